#pragma once

// Deterministic parallel loop over [0, n): work is split into fixed-size
// blocks handed to workers from an atomic counter. Callers write results by
// index (or accumulate per block and reduce in block order), so the outcome
// is independent of the number of workers.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace resreg {

inline int default_jobs() {
	const unsigned hc = std::thread::hardware_concurrency();
	return hc == 0 ? 1 : static_cast<int>(hc);
}

// fn(i) is called exactly once for every i in [0, n).
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                         int jobs) {
	jobs = std::max(1, jobs);
	if (jobs == 1 || n <= 1) {
		for (std::size_t i = 0; i < n; ++i) fn(i);
		return;
	}
	constexpr std::size_t kBlock = 64;
	const std::size_t n_blocks = (n + kBlock - 1) / kBlock;
	std::atomic<std::size_t> next{0};
	auto worker = [&] {
		for (;;) {
			const std::size_t b = next.fetch_add(1);
			if (b >= n_blocks) return;
			const std::size_t lo = b * kBlock;
			const std::size_t hi = std::min(n, lo + kBlock);
			for (std::size_t i = lo; i < hi; ++i) fn(i);
		}
	};
	std::vector<std::thread> pool;
	const int n_workers = static_cast<int>(
	    std::min<std::size_t>(static_cast<std::size_t>(jobs), n_blocks));
	pool.reserve(n_workers);
	for (int t = 1; t < n_workers; ++t) pool.emplace_back(worker);
	worker();
	for (auto& th : pool) th.join();
}

}  // namespace resreg
