#pragma once

////////////////////////////////////////////////////////////////////////////////
// Model primitives for the regulated-harvesting problem: price impact p(x),
// terminal shortfall cost f(x), competition/renewal intensity mu(x), the
// bundled parameter set, validation, and the reservation-utility helpers.
////////////////////////////////////////////////////////////////////////////////

#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace resreg {

// Thrown by validate() / config parsing; the message is surfaced verbatim.
struct ConfigError : std::runtime_error {
	using std::runtime_error::runtime_error;
};

// Signals that a closed form is unavailable and the caller must fall back to
// Monte Carlo (e.g. unregulated value under a non-constant revenue factor).
struct RequiresSimulation : std::runtime_error {
	using std::runtime_error::runtime_error;
};

////////////////////////////////////////////////////////////////////////////////
// Price
////////////////////////////////////////////////////////////////////////////////

// Unit price of harvesting effort at abundance x. The quantity the control
// problem actually sees is the revenue factor pi(x) = x p(x), which must be
// bounded above (sampled check in validate(); exact for both variants here).
struct PriceSpec {
	enum class Kind { Inverse, ExpImpact };

	Kind kind = Kind::Inverse;
	double P = 1.0;      // scale, >= 0; Inverse: p(x) = P/x, so pi == P
	double beta1 = 1.0;  // ExpImpact: p(x) = P exp(-beta1 x^beta2)
	double beta2 = 1.0;

	double operator()(double x) const;  // p(x), x > 0

	// pi(e^y) = e^y p(e^y), computed in log coordinates so large |y| cannot
	// overflow (the ExpImpact exponent is y - beta1 e^{beta2 y} -> -inf).
	double pi_of_log(double y) const;
	double pi(double x) const;

	double pi_sup() const;  // sup_{x>0} x p(x), closed form per variant
};

////////////////////////////////////////////////////////////////////////////////
// Terminal cost
////////////////////////////////////////////////////////////////////////////////

// f(x) = (c - (c/beta) x) 1_{x < beta}: linear penalty on terminal shortfall
// below the target abundance beta; zero at and above the target.
struct CostSpec {
	double c = 3.0;     // reintroduction cost, >= 0
	double beta = 0.9;  // target abundance, > 0

	double operator()(double x) const;
	double lipschitz() const { return c / beta; }
};

////////////////////////////////////////////////////////////////////////////////
// Competition / renewal intensity
////////////////////////////////////////////////////////////////////////////////

// mu(x) in the abundance drift x(lambda - mu(x)).
//  Logistic      mu(x) = x                (unbounded; the reference model)
//  Truncated     mu_n(x) = x (Theta(x + e^n + 1) - Theta(x - (e^n + 1))),
//                which agrees with x on [-e^n, e^n] and vanishes for
//                |x| >= e^n + 2
//  BoundedCustom piecewise-linear table, constant beyond the last knot
struct MuSpec {
	enum class Kind { Logistic, Truncated, BoundedCustom };

	Kind kind = Kind::Logistic;
	int n = 100;  // truncation level for Kind::Truncated
	std::shared_ptr<const std::vector<std::pair<double, double>>> table;

	double operator()(double x) const;

	static MuSpec logistic();
	static MuSpec truncated(int n);
	static MuSpec custom(std::vector<std::pair<double, double>> knots);
};

////////////////////////////////////////////////////////////////////////////////
// Parameter bundle
////////////////////////////////////////////////////////////////////////////////

enum class ReservationMode { Computed, Formula, Explicit };

// Effort is constrained to [-m_lower, m_upper]: positive = harvesting,
// negative = renewal/reintroduction.
struct EffortBounds {
	double m_lower = 10.0;  // renewal cap (magnitude)
	double m_upper = 10.0;  // harvest cap
};

struct ModelParams {
	double lambda = 1.2;   // intrinsic growth rate
	double sigma = 0.1;    // volatility, > 0
	double x0 = 1.2;       // initial abundance, > 0
	double horizon = 1.0;  // T, > 0
	double gamma = 0.1;    // agent risk aversion, > 0
	double m_lower = 10.0;
	double m_upper = 10.0;

	PriceSpec price;
	CostSpec cost;
	MuSpec mu;

	ReservationMode reservation_mode = ReservationMode::Computed;
	double reservation = -1.0;  // used only in Explicit mode; must be < 0

	double epsilon = 0.01;  // Hamiltonian regularization level

	EffortBounds bounds() const { return {m_lower, m_upper}; }
	double kappa() const { return 1.0 + gamma * sigma * sigma; }

	// Gamma = max(m_upper * kappa, (pi_sup + m_lower) * kappa): the |delta1|
	// radius beyond which the interior Hamiltonian branch is replaced by its
	// affine tails in the regularization.
	double clip_radius() const;
};

// Rejects invalid parameter sets with a message naming the offending field.
// Notably: sigma/gamma/x0/horizon must be positive, effort bounds nonnegative
// and not both zero ("degenerate effort set"), the revenue factor x p(x) must
// be bounded (sampled on a log grid), and an Explicit reservation must be < 0.
void validate(const ModelParams& p);

////////////////////////////////////////////////////////////////////////////////
// Reservation utilities
////////////////////////////////////////////////////////////////////////////////

// Certainty equivalent R~ = log(-R)/gamma of a reservation utility R < 0.
double reservation_tilde(double R, double gamma);

// Agent's best utility with no tax: -exp(-gamma T max_a (P a - a^2/2)) with
// the maximizer clamped to [-m_lower, m_upper]. Closed form requires the
// constant revenue factor (Inverse price); otherwise throws RequiresSimulation.
double unregulated_value(const ModelParams& p);

// The effective reservation utility per reservation_mode:
//   Computed  -> unregulated_value(p)
//   Formula   -> -exp(-gamma P^2 T)  (fixed closed-form constant; note it
//                differs from Computed by a factor 1/2 in the exponent)
//   Explicit  -> p.reservation
double resolve_reservation(const ModelParams& p);

}  // namespace resreg
