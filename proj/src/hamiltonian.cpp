#include "resreg/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

#include "resreg/smoothing.hpp"

namespace resreg {

namespace {

double fnv_mix(std::uint64_t& h, double v) {
	std::uint64_t bits;
	std::memcpy(&bits, &v, sizeof(bits));
	for (int i = 0; i < 8; ++i) {
		h ^= (bits >> (8 * i)) & 0xffu;
		h *= 1099511628211ULL;
	}
	return v;
}

// Branch values parameterized by (pi, d1).

double k1_pi(const HamiltonianContext& c, double pi, double d1) {
	const double m = c.m_lower;
	const double s = c.sigma * c.sigma * c.gamma * 0.5;
	return (d1 - pi - 0.5 * m) * m - s * (m + pi) * (m + pi);
}

double k2_pi(const HamiltonianContext& c, double pi, double d1) {
	const double m = c.m_upper;
	const double s = c.sigma * c.sigma * c.gamma * 0.5;
	const double r = std::max(m - pi, 0.0);
	return (-d1 + pi - 0.5 * m) * m - s * r * r;
}

// Q's three closed pieces as functions of (pi, d1); the interior piece is
// kappa s^2/2 - sigma^2 gamma pi^2/2 with s = pi - d1/kappa, and the clamped
// pieces are its tangent lines at s = -m_lower and s = m_upper.
double q_lower(const HamiltonianContext& c, double pi, double d1) {
	const double m = c.m_lower;
	return -0.5 * c.kappa * m * m - (pi * c.kappa - d1) * m -
	       0.5 * c.sigma * c.sigma * c.gamma * pi * pi;
}

double q_interior(const HamiltonianContext& c, double pi, double d1) {
	const double r = pi * c.kappa - d1;
	return 0.5 * r * r / c.kappa - 0.5 * c.sigma * c.sigma * c.gamma * pi * pi;
}

double q_upper(const HamiltonianContext& c, double pi, double d1) {
	const double m = c.m_upper;
	return -0.5 * c.kappa * m * m + (pi * c.kappa - d1) * m -
	       0.5 * c.sigma * c.sigma * c.gamma * pi * pi;
}

double affine_terms(const HamiltonianContext& c, double y, double d1,
                    double d2) {
	return c.drift_log(y) * d1 + 0.5 * c.sigma * c.sigma * d2;
}

}  // namespace

double HamiltonianContext::drift_log(double y) const {
	return lambda - 0.5 * sigma * sigma - mu(std::exp(y));
}

std::uint64_t HamiltonianContext::fingerprint() const {
	std::uint64_t h = 1469598103934665603ULL;
	fnv_mix(h, lambda);
	fnv_mix(h, sigma);
	fnv_mix(h, gamma);
	fnv_mix(h, m_lower);
	fnv_mix(h, m_upper);
	fnv_mix(h, epsilon);
	fnv_mix(h, blend_h);
	fnv_mix(h, static_cast<double>(static_cast<int>(price.kind)));
	fnv_mix(h, price.P);
	fnv_mix(h, price.beta1);
	fnv_mix(h, price.beta2);
	fnv_mix(h, static_cast<double>(static_cast<int>(mu.kind)));
	fnv_mix(h, static_cast<double>(mu.n));
	return h;
}

double q_exact(const HamiltonianContext& c, double pi, double d1) {
	const double s = pi - d1 / c.kappa;
	if (s < -c.m_lower) return q_lower(c, pi, d1);
	if (s > c.m_upper) return q_upper(c, pi, d1);
	return q_interior(c, pi, d1);
}

double q_eps(const HamiltonianContext& c, double pi, double d1) {
	const double s = pi - d1 / c.kappa;
	const double h = c.blend_h;
	// partition of unity: lower -> interior across s = -m_lower, then
	// interior -> upper across s = m_upper
	const double t1 = smoothing::theta((s + c.m_lower) / h);
	if (t1 <= 0.0) return q_lower(c, pi, d1);
	const double t2 = smoothing::theta((s - c.m_upper) / h);
	const double mid = t2 <= 0.0 ? q_interior(c, pi, d1)
	                             : (1.0 - t2) * q_interior(c, pi, d1) +
	                                   t2 * q_upper(c, pi, d1);
	if (t1 >= 1.0) return mid;
	return (1.0 - t1) * q_lower(c, pi, d1) + t1 * mid;
}

double k1(const HamiltonianContext& c, double y, double d1) {
	return k1_pi(c, c.pi_log(y), d1);
}

double k2(const HamiltonianContext& c, double y, double d1) {
	return k2_pi(c, c.pi_log(y), d1);
}

double k3_eps(const HamiltonianContext& c, double y, double d1) {
	const double pi = c.pi_log(y);
	// window weights saturate exactly for |d1| >= Gamma + 1 and vanish for
	// |d1| <= Gamma, so the core is q_eps and the tails are affine in d1
	// (d1 >> 0 drives s below -m_lower, hence the m_lower tail there)
	const double t_pos = smoothing::theta(2.0 * (d1 - c.Gamma) - 1.0);
	const double t_neg = smoothing::theta(-2.0 * (c.Gamma + d1) - 1.0);
	const double r = pi * c.kappa - d1;
	double v = 0.0;
	const double core = 1.0 - t_pos - t_neg;
	if (core > 0.0) v += q_eps(c, pi, d1) * core;
	if (t_pos > 0.0)
		v += (-0.5 * c.kappa * c.m_lower * c.m_lower - r * c.m_lower) * t_pos;
	if (t_neg > 0.0)
		v += (-0.5 * c.kappa * c.m_upper * c.m_upper + r * c.m_upper) * t_neg;
	return v;
}

double hamiltonian_exact(const HamiltonianContext& c, double y, double d1,
                         double d2) {
	const double pi = c.pi_log(y);
	const double m = std::max(k1_pi(c, pi, d1),
	                          std::max(k2_pi(c, pi, d1), q_exact(c, pi, d1)));
	return m + affine_terms(c, y, d1, d2);
}

double hamiltonian_eps(const HamiltonianContext& c, double y, double d1,
                       double d2) {
	const double pi = c.pi_log(y);
	const double m = smoothing::max3_eps(k1_pi(c, pi, d1), k2_pi(c, pi, d1),
	                                     k3_eps(c, y, d1), c.epsilon);
	return m + affine_terms(c, y, d1, d2);
}

double candidate_effort(const HamiltonianContext& c, double y, double d1,
                        bool eps_mode) {
	const double pi = c.pi_log(y);
	const double b1 = k1_pi(c, pi, d1);
	const double b2 = k2_pi(c, pi, d1);
	const double b3 = eps_mode ? k3_eps(c, y, d1) : q_exact(c, pi, d1);
	if (b3 >= b1 && b3 >= b2)
		return std::clamp(pi - d1 / c.kappa, -c.m_lower, c.m_upper);
	return b1 >= b2 ? -c.m_lower : c.m_upper;
}

////////////////////////////////////////////////////////////////////////////////
// Brute-force oracle
////////////////////////////////////////////////////////////////////////////////

double z_half_width(const HamiltonianContext& c) {
	return c.Gamma + c.m_upper + c.m_lower + c.price.pi_sup() + 1.0;
}

double z_lipschitz_bound(const HamiltonianContext& c, double d1) {
	const double zmax = z_half_width(c);
	return 2.0 * c.price.pi_sup() + (1.0 + c.sigma * c.sigma * c.gamma) * zmax +
	       std::abs(d1);
}

namespace {

// F(z) transcribed from the definition, on purpose not reusing the branch
// formulas above.
struct InnerObjective {
	double pi, d1, sg, m_lo, m_up;
	double operator()(double z) const {
		const double a = std::clamp(pi + z, -m_lo, m_up);
		return pi * a - 0.5 * a * a - 0.5 * sg * z * z - a * d1;
	}
};

}  // namespace

double brute_force_hamiltonian(const HamiltonianContext& c, double y, double d1,
                               double d2, const ZGridSpec& zg) {
	const double pi = c.pi_log(y);
	const InnerObjective f{pi, d1, c.sigma * c.sigma * c.gamma, c.m_lower,
	                       c.m_upper};
	const double hw = z_half_width(c);

	// clamp-region edges in z
	const double lo_edge = -c.m_lower - pi;
	const double up_edge = c.m_upper - pi;

	double best = -std::numeric_limits<double>::infinity();
	auto scan = [&](double a, double b, double step) {
		const int n = std::max(1, static_cast<int>(std::ceil((b - a) / step)));
		double arg = a, local = -std::numeric_limits<double>::infinity();
		for (int i = 0; i <= n; ++i) {
			const double z = i == n ? b : a + (b - a) * i / n;
			const double v = f(z);
			if (v > local) {
				local = v;
				arg = z;
			}
		}
		best = std::max(best, local);
		return arg;
	};

	// F is concave within each clamp region, so a regional coarse argmax plus
	// a fine pass around it finds the regional sup to fine_step accuracy.
	const double edges[4] = {-hw, lo_edge, up_edge, hw};
	for (int r = 0; r < 3; ++r) {
		const double a = std::max(edges[r], -hw);
		const double b = std::min(edges[r + 1], hw);
		if (a > b) continue;
		const double arg = scan(a, b, zg.coarse_step);
		scan(std::max(a, arg - 2.0 * zg.coarse_step),
		     std::min(b, arg + 2.0 * zg.coarse_step), zg.fine_step);
	}
	return best + affine_terms(c, y, d1, d2);
}

////////////////////////////////////////////////////////////////////////////////
// Context construction / blend certification
////////////////////////////////////////////////////////////////////////////////

HamiltonianContext HamiltonianContext::make(const ModelParams& p) {
	HamiltonianContext c;
	c.lambda = p.lambda;
	c.sigma = p.sigma;
	c.gamma = p.gamma;
	c.kappa = p.kappa();
	c.m_lower = p.m_lower;
	c.m_upper = p.m_upper;
	c.epsilon = p.epsilon;
	c.Gamma = p.clip_radius();
	c.price = p.price;
	c.mu = p.mu;

	const double tol = c.epsilon / 3.0;
	const double pi_hi = c.price.pi_sup();
	double h = c.epsilon / (6.0 * c.kappa * (c.m_upper + c.m_lower + 1.0));
	for (int iter = 0; iter < 60; ++iter) {
		c.blend_h = h;
		double sup = 0.0;
		for (int i = 0; i <= 40; ++i) {
			const double pi = pi_hi * i / 40.0;
			// coarse d1 sweep plus dense sampling of both switching windows,
			// where the blend error actually lives
			for (int j = 0; j <= 160; ++j) {
				const double d1 = -c.Gamma - 1.0 + (2.0 * c.Gamma + 2.0) * j / 160.0;
				sup = std::max(sup, std::abs(q_eps(c, pi, d1) - q_exact(c, pi, d1)));
			}
			for (const double s0 : {-c.m_lower, c.m_upper}) {
				for (int j = -40; j <= 40; ++j) {
					const double s = s0 + 2.0 * h * j / 40.0;
					const double d1 = (pi - s) * c.kappa;
					sup = std::max(sup,
					               std::abs(q_eps(c, pi, d1) - q_exact(c, pi, d1)));
				}
			}
		}
		if (sup <= tol) return c;
		h *= 0.5;
	}
	throw std::runtime_error("Q_eps blend certification failed to converge");
}

}  // namespace resreg
