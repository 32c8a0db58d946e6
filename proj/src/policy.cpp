#include "resreg/policy.hpp"

#include <utility>

#include "resreg/agent.hpp"

namespace resreg {

FeedbackPolicy::FeedbackPolicy(std::function<double(double, double)> z_of_t_logx,
                               PriceSpec price, EffortBounds bounds,
                               std::shared_ptr<const void> keepalive)
    : zfun_(std::move(z_of_t_logx)),
      price_(price),
      bounds_(bounds),
      keepalive_(std::move(keepalive)) {}

FeedbackPolicy FeedbackPolicy::constant_z(double z, const ModelParams& p) {
	return FeedbackPolicy([z](double, double) { return z; }, p.price,
	                      p.bounds());
}

PolicyEval FeedbackPolicy::eval(double t, double x, double log_x,
                                PathState& st) const {
	if (!st.stopped && x >= stop_level_) st.stopped = true;
	const double z = st.stopped ? 0.0 : zfun_(t, log_x);
	const double pi = price_.pi_of_log(log_x);
	return {z, a_star(pi, z, bounds_)};
}

FeedbackPolicy FeedbackPolicy::with_stop_level(double level) const {
	FeedbackPolicy copy = *this;
	copy.stop_level_ = level;
	return copy;
}

FeedbackPolicy stopped_policy(const FeedbackPolicy& base, int n) {
	return base.with_stop_level(std::exp(static_cast<double>(n)));
}

}  // namespace resreg
