#include "resreg/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "resreg/quadrature.hpp"

namespace resreg::smoothing {

double rho(double x) {
	const double s = 1.0 - x * x;
	if (s <= 0.0) return 0.0;
	return std::exp(-1.0 / s);
}

namespace {

////////////////////////////////////////////////////////////////////////////////
// Theta table
//
// 4096 uniform knots on [-1, 1]. Knot values accumulate per-interval adaptive
// quadrature of rho (tolerance 1e-10 overall); knot derivatives are exact,
// Theta' = rho / mass. Interpolation is cubic Hermite with a Fritsch-Carlson
// limiter, which keeps the interpolant monotone even though the exact slopes
// already nearly guarantee it.
////////////////////////////////////////////////////////////////////////////////

constexpr int kKnots = 4096;

struct ThetaTable {
	double mass = 0.0;
	double h = 0.0;                     // knot spacing
	std::array<double, kKnots> val{};   // Theta at knots
	std::array<double, kKnots> slope{}; // limited dTheta/du at knots
};

ThetaTable build_theta_table() {
	ThetaTable t;
	t.h = 2.0 / (kKnots - 1);
	const double tol = 1e-10 / kKnots;

	std::vector<double> cum(kKnots, 0.0);
	for (int i = 1; i < kKnots; ++i) {
		const double a = -1.0 + t.h * (i - 1);
		const double b = -1.0 + t.h * i;
		cum[i] = cum[i - 1] + quad::integrate_adaptive(rho, a, b, tol);
	}
	t.mass = cum[kKnots - 1];

	for (int i = 0; i < kKnots; ++i) {
		t.val[i] = cum[i] / t.mass;
		t.slope[i] = rho(-1.0 + t.h * i) / t.mass;
	}
	t.val[0] = 0.0;
	t.val[kKnots - 1] = 1.0;

	// Fritsch-Carlson: slope at a knot capped at 3x the smaller adjacent
	// secant (forced to 0 next to a flat interval), which guarantees a
	// monotone interpolant.
	for (int i = 0; i < kKnots; ++i) {
		const double dl =
		    i > 0 ? (t.val[i] - t.val[i - 1]) / t.h
		          : (t.val[1] - t.val[0]) / t.h;
		const double dr = i + 1 < kKnots
		                      ? (t.val[i + 1] - t.val[i]) / t.h
		                      : (t.val[kKnots - 1] - t.val[kKnots - 2]) / t.h;
		t.slope[i] = std::clamp(t.slope[i], 0.0, 3.0 * std::min(dl, dr));
	}
	return t;
}

const ThetaTable& theta_table() {
	static const ThetaTable t = build_theta_table();
	return t;
}

}  // namespace

double rho_mass() { return theta_table().mass; }

double rho_n(double x, int n) {
	return n * rho(n * x) / theta_table().mass;
}

double theta(double u) {
	if (u <= -1.0) return 0.0;
	if (u >= 1.0) return 1.0;
	const ThetaTable& t = theta_table();
	int i = static_cast<int>((u + 1.0) / t.h);
	i = std::clamp(i, 0, kKnots - 2);
	const double s = (u - (-1.0 + t.h * i)) / t.h;
	const double y0 = t.val[i], y1 = t.val[i + 1];
	const double d0 = t.slope[i] * t.h, d1 = t.slope[i + 1] * t.h;
	const double s2 = s * s, s3 = s2 * s;
	return (2.0 * s3 - 3.0 * s2 + 1.0) * y0 + (s3 - 2.0 * s2 + s) * d0 +
	       (-2.0 * s3 + 3.0 * s2) * y1 + (s3 - s2) * d1;
}

double abs_eps(double x, double eps) {
	const double a = std::abs(x);
	if (a >= eps) return a;            // both windows saturated
	if (a <= 0.25 * eps) return 0.0;   // both windows closed
	const double r = 4.0 * x / eps;
	return a * (theta(-r - 3.0) + theta(r - 3.0));
}

double max_eps(double x, double y, double eps) {
	return 0.5 * (abs_eps(x - y, eps) + x + y);
}

double max3_eps(double a, double b, double c, double eps) {
	return max_eps(a, max_eps(b, c, 0.5 * eps), 0.5 * eps);
}

double mu_n(double x, int n) {
	const double e = std::exp(static_cast<double>(n));
	return x * (theta(x + e + 1.0) - theta(x - (e + 1.0)));
}

////////////////////////////////////////////////////////////////////////////////
// MollifiedCost
////////////////////////////////////////////////////////////////////////////////

MollifiedCost::MollifiedCost(CostSpec f, int n) : f_(f), n_(n) {
	if (n < 1) throw std::invalid_argument("mollify_cost: n must be >= 1");
	width_ = 1.0 / n;
}

double MollifiedCost::operator()(double x) const {
	const double lo = x - width_, hi = x + width_;
	// Outside the kink window the convolution of an affine (or zero) piece
	// against an even unit-mass kernel reproduces f exactly; skip quadrature.
	if (lo >= f_.beta) return 0.0;
	if (hi <= f_.beta) return f_(x);

	const auto& gl = quad::gauss_legendre(64);
	auto conv = [&](double a, double b) {
		const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
		double s = 0.0;
		for (size_t i = 0; i < gl.x.size(); ++i) {
			const double u = mid + half * gl.x[i];
			s += gl.w[i] * f_(u) * rho_n(x - u, n_);
		}
		return s * half;
	};
	return conv(lo, f_.beta) + conv(f_.beta, hi);
}

MollifiedCost mollify_cost(const CostSpec& f, int n) {
	return MollifiedCost(f, n);
}

}  // namespace resreg::smoothing
