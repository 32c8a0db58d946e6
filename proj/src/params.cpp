#include "resreg/params.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "resreg/smoothing.hpp"

namespace resreg {

////////////////////////////////////////////////////////////////////////////////
// PriceSpec
////////////////////////////////////////////////////////////////////////////////

double PriceSpec::operator()(double x) const {
	switch (kind) {
		case Kind::Inverse:
			return P / x;
		case Kind::ExpImpact:
			return P * std::exp(-beta1 * std::pow(x, beta2));
	}
	return 0.0;
}

double PriceSpec::pi_of_log(double y) const {
	switch (kind) {
		case Kind::Inverse:
			return P;
		case Kind::ExpImpact: {
			// x p(x) = P exp(y - beta1 e^{beta2 y}); the inner exp may
			// overflow to +inf, which cleanly drives the result to 0.
			const double inner = std::exp(beta2 * y);
			const double expo = y - beta1 * inner;
			return P * std::exp(expo);
		}
	}
	return 0.0;
}

double PriceSpec::pi(double x) const { return pi_of_log(std::log(x)); }

double PriceSpec::pi_sup() const {
	switch (kind) {
		case Kind::Inverse:
			return P;
		case Kind::ExpImpact: {
			// maximize y - beta1 e^{beta2 y}: stationary at
			// e^{beta2 y} = 1/(beta1 beta2), value log(x*) - 1/beta2.
			const double xstar = std::pow(1.0 / (beta1 * beta2), 1.0 / beta2);
			return P * xstar * std::exp(-1.0 / beta2);
		}
	}
	return 0.0;
}

////////////////////////////////////////////////////////////////////////////////
// CostSpec
////////////////////////////////////////////////////////////////////////////////

double CostSpec::operator()(double x) const {
	return x < beta ? c - (c / beta) * x : 0.0;
}

////////////////////////////////////////////////////////////////////////////////
// MuSpec
////////////////////////////////////////////////////////////////////////////////

double MuSpec::operator()(double x) const {
	switch (kind) {
		case Kind::Logistic:
			return x;
		case Kind::Truncated:
			return smoothing::mu_n(x, n);
		case Kind::BoundedCustom: {
			const auto& t = *table;
			if (x <= t.front().first) return t.front().second;
			if (x >= t.back().first) return t.back().second;
			auto it = std::upper_bound(
			    t.begin(), t.end(), x,
			    [](double v, const auto& kv) { return v < kv.first; });
			const auto& [x1, y1] = *it;
			const auto& [x0_, y0] = *(it - 1);
			const double s = (x - x0_) / (x1 - x0_);
			return y0 + s * (y1 - y0);
		}
	}
	return 0.0;
}

MuSpec MuSpec::logistic() { return MuSpec{Kind::Logistic, 0, nullptr}; }

MuSpec MuSpec::truncated(int n) { return MuSpec{Kind::Truncated, n, nullptr}; }

MuSpec MuSpec::custom(std::vector<std::pair<double, double>> knots) {
	MuSpec m;
	m.kind = Kind::BoundedCustom;
	m.table = std::make_shared<const std::vector<std::pair<double, double>>>(
	    std::move(knots));
	return m;
}

////////////////////////////////////////////////////////////////////////////////
// Validation
////////////////////////////////////////////////////////////////////////////////

double ModelParams::clip_radius() const {
	const double k = kappa();
	return std::max(m_upper * k, (price.pi_sup() + m_lower) * k);
}

namespace {

void require(bool ok, const std::string& msg) {
	if (!ok) throw ConfigError(msg);
}

}  // namespace

void validate(const ModelParams& p) {
	require(std::isfinite(p.lambda), "lambda must be finite");
	require(std::isfinite(p.sigma) && p.sigma > 0.0, "sigma must be > 0");
	require(std::isfinite(p.x0) && p.x0 > 0.0, "x0 must be > 0");
	require(std::isfinite(p.horizon) && p.horizon > 0.0, "horizon must be > 0");
	require(std::isfinite(p.gamma) && p.gamma > 0.0, "gamma must be > 0");
	require(std::isfinite(p.m_lower) && p.m_lower >= 0.0, "m_lower must be >= 0");
	require(std::isfinite(p.m_upper) && p.m_upper >= 0.0, "m_upper must be >= 0");
	require(p.m_lower > 0.0 || p.m_upper > 0.0,
	        "degenerate effort set: m_lower and m_upper are both zero");

	require(std::isfinite(p.price.P) && p.price.P >= 0.0, "price.P must be >= 0");
	if (p.price.kind == PriceSpec::Kind::ExpImpact) {
		require(p.price.beta1 > 0.0, "price.beta1 must be > 0");
		require(p.price.beta2 > 0.0, "price.beta2 must be > 0");
	}
	// Revenue-factor boundedness, sampled on a log grid (exact by construction
	// for these variants, but the scan also catches NaN/overflow in configs).
	const double cap = p.price.pi_sup();
	require(std::isfinite(cap), "price: sup of x p(x) is not finite");
	for (int i = 0; i <= 200; ++i) {
		const double y = -30.0 + 60.0 * i / 200.0;
		const double v = p.price.pi_of_log(y);
		require(std::isfinite(v) && v <= cap * (1.0 + 1e-12) + 1e-12,
		        "price: x p(x) unbounded on sampled log grid");
	}

	require(std::isfinite(p.cost.c) && p.cost.c >= 0.0, "cost.c must be >= 0");
	require(std::isfinite(p.cost.beta) && p.cost.beta > 0.0,
	        "cost.beta must be > 0");

	if (p.mu.kind == MuSpec::Kind::Truncated)
		require(p.mu.n >= 0 && p.mu.n <= 700, "mu.n must be in [0, 700]");
	if (p.mu.kind == MuSpec::Kind::BoundedCustom)
		require(p.mu.table && !p.mu.table->empty(), "mu: empty custom table");

	if (p.reservation_mode == ReservationMode::Explicit)
		require(std::isfinite(p.reservation) && p.reservation < 0.0,
		        "reservation must be < 0");
	if (p.reservation_mode == ReservationMode::Computed)
		require(p.price.kind == PriceSpec::Kind::Inverse,
		        "reservation_mode=computed needs the inverse price variant; "
		        "use explicit instead");

	require(std::isfinite(p.epsilon) && p.epsilon > 0.0, "epsilon must be > 0");
}

////////////////////////////////////////////////////////////////////////////////
// Reservation utilities
////////////////////////////////////////////////////////////////////////////////

double reservation_tilde(double R, double gamma) {
	if (!(R < 0.0)) throw ConfigError("reservation utility must be < 0");
	return std::log(-R) / gamma;
}

double unregulated_value(const ModelParams& p) {
	if (p.price.kind != PriceSpec::Kind::Inverse)
		throw RequiresSimulation(
		    "unregulated value has no closed form for non-constant x p(x)");
	// With pi == P the exponent is deterministic: T max_a (P a - a^2/2) over
	// the effort interval; the unconstrained maximizer a = P gets clamped.
	const double a = std::clamp(p.price.P, -p.m_lower, p.m_upper);
	const double gain = p.price.P * a - 0.5 * a * a;
	return -std::exp(-p.gamma * p.horizon * gain);
}

double resolve_reservation(const ModelParams& p) {
	switch (p.reservation_mode) {
		case ReservationMode::Computed:
			return unregulated_value(p);
		case ReservationMode::Formula:
			return -std::exp(-p.gamma * p.price.P * p.price.P * p.horizon);
		case ReservationMode::Explicit:
			return p.reservation;
	}
	return p.reservation;
}

}  // namespace resreg
