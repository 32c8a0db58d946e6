#pragma once

// Deterministic per-path random streams: path k draws from an engine seeded
// by splitmix64-mixing (root_seed, k), so results are independent of thread
// count and scheduling, and repeated runs with the same root seed are
// bit-identical.

#include <cstdint>
#include <random>

namespace resreg {

inline std::uint64_t splitmix64(std::uint64_t& state) {
	std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
	z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
	z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
	return z ^ (z >> 31);
}

inline std::mt19937_64 make_stream(std::uint64_t root_seed,
                                   std::uint64_t stream_index) {
	std::uint64_t s = root_seed;
	std::uint64_t a = splitmix64(s);
	s ^= stream_index * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL;
	std::uint64_t b = splitmix64(s);
	return std::mt19937_64(a ^ (b + 0x9e3779b97f4a7c15ULL));
}

// N(0,1) draws via inverse-free polar-less Box-Muller on raw 53-bit uniforms;
// self-contained so streams stay reproducible across standard libraries.
class NormalDraws {
public:
	explicit NormalDraws(std::mt19937_64 eng) : eng_(eng) {}

	double operator()() {
		if (have_) {
			have_ = false;
			return spare_;
		}
		double u1 = uniform();
		while (u1 <= 0.0) u1 = uniform();
		const double u2 = uniform();
		const double r = std::sqrt(-2.0 * std::log(u1));
		const double a = 6.283185307179586476925286766559 * u2;
		spare_ = r * std::sin(a);
		have_ = true;
		return r * std::cos(a);
	}

private:
	double uniform() {  // in [0, 1)
		return (eng_() >> 11) * 0x1.0p-53;
	}

	std::mt19937_64 eng_;
	double spare_ = 0.0;
	bool have_ = false;
};

}  // namespace resreg
