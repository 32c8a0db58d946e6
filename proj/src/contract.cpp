#include "resreg/contract.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "resreg/parallel.hpp"

namespace resreg {

namespace {

McEstimate summarize(const std::vector<double>& v) {
	McEstimate e;
	e.n = static_cast<int>(v.size());
	if (v.empty()) return e;
	double s = 0.0;
	for (double x : v) s += x;
	e.mean = s / e.n;
	double q = 0.0;
	for (double x : v) q += (x - e.mean) * (x - e.mean);
	e.se = e.n > 1 ? std::sqrt(q / (e.n - 1.0) / e.n) : 0.0;
	return e;
}

}  // namespace

ContractOutcome reconstruct_tax(const ModelParams& params, SimPath& path,
                                double r_tilde) {
	const int n = path.n_steps();
	ContractOutcome out;
	path.y.assign(static_cast<size_t>(std::max(n, 0)) + 1, r_tilde);
	if (n <= 0) {
		out.xi = r_tilde;
		out.xi_check = r_tilde;
		out.x_T = path.x.empty() ? params.x0 : path.x.back();
		out.principal_payoff = out.xi - params.cost(out.x_T);
		out.agent_exponent = -out.xi;
		return out;
	}
	const double dt = path.dt();
	const double half_s2g = 0.5 * params.sigma * params.sigma * params.gamma;
	const EffortBounds bounds = params.bounds();
	double y = r_tilde, yb = r_tilde;
	double gap = 0.0, zmax = 0.0, gain = 0.0;
	for (int k = 0; k < n; ++k) {
		const double xk = path.x[k];
		const double zk = path.z[k];
		const double ak = path.alpha[k];
		const double pik = params.price.pi(xk);
		zmax = std::max(zmax, std::abs(zk));
		gain += (pik * ak - 0.5 * ak * ak) * dt;
		const double gk = g_running(xk, zk, params.price, bounds);
		y += -(gk + half_s2g * zk * zk +
		       zk * (params.lambda - params.mu(xk))) *
		         dt +
		     zk * (path.x[k + 1] - xk) / xk;
		yb += -(0.5 * ak * ak - pik * ak + half_s2g * zk * zk) * dt +
		      params.sigma * zk * path.dw[k];
		path.y[k + 1] = y;
		gap = std::max(gap, std::abs(y - yb));
	}
	out.xi = y;
	out.xi_check = yb;
	out.two_form_gap = gap;
	out.flagged = gap > (1e-3 + 50.0 * dt) * (1.0 + zmax);
	out.x_T = path.x[n];
	out.principal_payoff = out.xi - params.cost(out.x_T);
	out.agent_exponent = gain - out.xi;
	return out;
}

McEstimate principal_value_mc(const ModelParams& params, const TimeGrid& grid,
                              const FeedbackPolicy& policy, int n_paths,
                              std::uint64_t seed, int jobs) {
	const double r_tilde =
	    reservation_tilde(resolve_reservation(params), params.gamma);
	std::vector<double> vals(n_paths);
	parallel_for(
	    static_cast<size_t>(n_paths),
	    [&](size_t i) {
		    SimPath p = simulate_controlled(params, grid, policy, seed, i);
		    vals[i] = reconstruct_tax(params, p, r_tilde).principal_payoff;
	    },
	    jobs);
	return summarize(vals);
}

McEstimate agent_utility_mc(const ModelParams& params, const TimeGrid& grid,
                            const FeedbackPolicy& tax_policy,
                            const std::function<double(double, double)>& effort,
                            int n_paths, std::uint64_t seed, int jobs,
                            TaxRule rule) {
	const double r_tilde =
	    rule == TaxRule::Feedback
	        ? reservation_tilde(resolve_reservation(params), params.gamma)
	        : 0.0;
	std::vector<double> vals(n_paths);
	parallel_for(
	    static_cast<size_t>(n_paths),
	    [&](size_t i) {
		    SimPath p =
		        simulate_controlled(params, grid, tax_policy, seed, i,
		                            Measure::Tilted, SdeScheme::LogEuler, effort);
		    const ContractOutcome oc = reconstruct_tax(params, p, r_tilde);
		    // TaxRule::None waives the tax: add xi back into the exponent.
		    const double exponent = rule == TaxRule::Feedback
		                                ? oc.agent_exponent
		                                : oc.agent_exponent + oc.xi;
		    vals[i] = -std::exp(-params.gamma * exponent);
	    },
	    jobs);
	return summarize(vals);
}

}  // namespace resreg
