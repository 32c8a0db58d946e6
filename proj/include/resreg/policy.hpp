#pragma once

////////////////////////////////////////////////////////////////////////////////
// Feedback control as handed to the simulator: z(t, x) (the contract's
// sensitivity to fluctuations) plus the induced best-response effort
// a* = clamp(pi + z). Optionally carries an absorbing stop level: once the
// path's running max crosses it, z drops to 0 for the rest of the path
// (the truncation-transfer construction).
////////////////////////////////////////////////////////////////////////////////

#include <cmath>
#include <functional>
#include <limits>
#include <memory>

#include "resreg/params.hpp"

namespace resreg {

// Per-path mutable state threaded through eval(); the stop is absorbing.
struct PathState {
	bool stopped = false;
};

struct PolicyEval {
	double z = 0.0;
	double alpha = 0.0;
};

class FeedbackPolicy {
public:
	// z as a function of (t, log x). keepalive pins whatever backs the closure
	// (e.g. a solved value surface).
	FeedbackPolicy(std::function<double(double, double)> z_of_t_logx,
	               PriceSpec price, EffortBounds bounds,
	               std::shared_ptr<const void> keepalive = nullptr);

	static FeedbackPolicy constant_z(double z, const ModelParams& p);

	// Stateless z lookup (ignores any stop level).
	double z_at(double t, double x) const { return zfun_(t, std::log(x)); }

	PolicyEval eval(double t, double x, double log_x, PathState& st) const;

	// Copy of this policy that zeroes z once the running max of x reaches
	// `level` (absorbing).
	FeedbackPolicy with_stop_level(double level) const;

	double stop_level() const { return stop_level_; }
	const EffortBounds& bounds() const { return bounds_; }
	const PriceSpec& price() const { return price_; }

private:
	std::function<double(double, double)> zfun_;
	PriceSpec price_;
	EffortBounds bounds_;
	double stop_level_ = std::numeric_limits<double>::infinity();
	std::shared_ptr<const void> keepalive_;
};

// The policy with z = 0 once X has reached e^n (and the original z before):
// the stopped contract used to transfer guarantees to the untruncated model.
FeedbackPolicy stopped_policy(const FeedbackPolicy& base, int n);

}  // namespace resreg
