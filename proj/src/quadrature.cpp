#include "resreg/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace resreg::quad {

namespace {

GaussLegendre compute_rule(int n) {
	GaussLegendre r;
	r.x.resize(n);
	r.w.resize(n);
	const int m = (n + 1) / 2;  // roots come in +/- pairs
	for (int k = 0; k < m; ++k) {
		// Tricomi-style initial guess, then Newton on P_n.
		double z = std::cos(std::numbers::pi * (k + 0.75) / (n + 0.5));
		double pp = 0.0;
		for (int it = 0; it < 100; ++it) {
			double p0 = 1.0, p1 = 0.0;
			for (int j = 0; j < n; ++j) {
				const double p2 = p1;
				p1 = p0;
				p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
			}
			// p0 = P_n(z); derivative from the standard identity.
			pp = n * (z * p0 - p1) / (z * z - 1.0);
			const double dz = p0 / pp;
			z -= dz;
			if (std::abs(dz) < 1e-15) break;
		}
		r.x[k] = -z;
		r.x[n - 1 - k] = z;
		const double wk = 2.0 / ((1.0 - z * z) * pp * pp);
		r.w[k] = wk;
		r.w[n - 1 - k] = wk;
	}
	if (n % 2 == 1) r.x[n / 2] = 0.0;
	return r;
}

double panel(const std::function<double(double)>& f, double a, double b,
             const GaussLegendre& r) {
	const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
	double s = 0.0;
	for (size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * f(mid + half * r.x[i]);
	return s * half;
}

double adaptive(const std::function<double(double)>& f, double a, double b,
                double tol, const GaussLegendre& lo, const GaussLegendre& hi,
                int depth) {
	const double coarse = panel(f, a, b, lo);
	const double fine = panel(f, a, b, hi);
	if (std::abs(fine - coarse) <= tol || depth >= 48) return fine;
	const double mid = 0.5 * (a + b);
	return adaptive(f, a, mid, 0.5 * tol, lo, hi, depth + 1) +
	       adaptive(f, mid, b, 0.5 * tol, lo, hi, depth + 1);
}

}  // namespace

const GaussLegendre& gauss_legendre(int n) {
	if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
	static std::map<int, GaussLegendre> cache;
	static std::mutex mtx;
	std::lock_guard<std::mutex> lock(mtx);
	auto it = cache.find(n);
	if (it == cache.end()) it = cache.emplace(n, compute_rule(n)).first;
	return it->second;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 int n) {
	return panel(f, a, b, gauss_legendre(n));
}

double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double tol) {
	return adaptive(f, a, b, tol, gauss_legendre(15), gauss_legendre(31), 0);
}

}  // namespace resreg::quad
