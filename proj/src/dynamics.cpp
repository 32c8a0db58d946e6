#include "resreg/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "resreg/parallel.hpp"
#include "resreg/rng.hpp"

namespace resreg {

namespace {

SimPath make_empty(const TimeGrid& grid) {
	SimPath p;
	const int n = grid.n_steps;
	p.t.resize(n + 1);
	for (int k = 0; k <= n; ++k) p.t[k] = grid.time(k);
	p.x.assign(n + 1, 0.0);
	p.alpha.assign(n + 1, 0.0);
	p.z.assign(n + 1, 0.0);
	p.dw.assign(n + 1, 0.0);  // dw[k] drives step k -> k+1; dw[n] unused = 0
	return p;
}

}  // namespace

SimPath simulate_with_noise(
    const ModelParams& params, const TimeGrid& grid,
    const FeedbackPolicy& policy, const std::vector<double>& dw,
    Measure measure, SdeScheme scheme,
    const std::function<double(double, double)>& effort_override) {
	const int n = grid.n_steps;
	if (static_cast<int>(dw.size()) < n)
		throw std::invalid_argument("simulate_with_noise: need n_steps increments");
	const double dt = grid.dt();
	const double sig = params.sigma;
	const double lam = params.lambda;

	SimPath path = make_empty(grid);
	PathState st;
	double x = params.x0;
	double log_x = std::log(x);
	for (int k = 0; k < n; ++k) {
		const double tk = path.t[k];
		const PolicyEval pe = policy.eval(tk, x, log_x, st);
		double a = pe.alpha;
		if (effort_override)
			a = std::clamp(effort_override(tk, x), -params.m_lower,
			               params.m_upper);
		path.x[k] = x;
		path.alpha[k] = a;
		path.z[k] = pe.z;
		path.dw[k] = dw[k];

		const double tilt = measure == Measure::Tilted ? a : 0.0;
		const double mu_x = params.mu(x);
		if (scheme == SdeScheme::LogEuler) {
			log_x += (lam - 0.5 * sig * sig - mu_x - tilt) * dt + sig * dw[k];
			x = std::exp(log_x);
		} else {
			x += x * (lam - mu_x - tilt) * dt + sig * x * dw[k];
			if (!(x > 0.0))
				throw std::runtime_error(
				    "plain Euler lost positivity; use the log scheme");
			log_x = std::log(x);
		}
	}
	path.x[n] = x;
	// terminal slots repeat the last applied control for export convenience
	if (n > 0) {
		path.alpha[n] = path.alpha[n - 1];
		path.z[n] = path.z[n - 1];
	}
	return path;
}

SimPath simulate_controlled(
    const ModelParams& params, const TimeGrid& grid,
    const FeedbackPolicy& policy, std::uint64_t root_seed,
    std::uint64_t path_index, Measure measure, SdeScheme scheme,
    const std::function<double(double, double)>& effort_override) {
	const int n = grid.n_steps;
	NormalDraws normals(make_stream(root_seed, path_index));
	const double sq = std::sqrt(grid.dt());
	std::vector<double> dw(n);
	for (int k = 0; k < n; ++k) dw[k] = sq * normals();
	SimPath p = simulate_with_noise(params, grid, policy, dw, measure, scheme,
	                                effort_override);
	p.root_seed = root_seed;
	p.index = path_index;
	return p;
}

std::vector<double> exact_logistic(const ModelParams& params,
                                   const TimeGrid& grid,
                                   const std::vector<double>& dw) {
	if (params.mu.kind != MuSpec::Kind::Logistic)
		throw std::invalid_argument(
		    "exact_logistic: closed form requires the logistic mu variant");
	const int n = grid.n_steps;
	if (static_cast<int>(dw.size()) < n)
		throw std::invalid_argument("exact_logistic: need n_steps increments");
	const double dt = grid.dt();
	const double drift = params.lambda - 0.5 * params.sigma * params.sigma;

	std::vector<double> x(n + 1);
	double wsum = 0.0;
	double expo_prev = 1.0;  // e^{drift*0 + sigma*W_0}
	double integral = 0.0;   // trapezoid accumulation
	x[0] = params.x0;
	for (int k = 1; k <= n; ++k) {
		wsum += dw[k - 1];
		const double expo = std::exp(drift * (dt * k) + params.sigma * wsum);
		integral += 0.5 * dt * (expo_prev + expo);
		expo_prev = expo;
		x[k] = params.x0 * expo / (1.0 + params.x0 * integral);
	}
	return x;
}

double girsanov_weight(const SimPath& path, const ModelParams& params) {
	const double dt = path.dt();
	const double sig = params.sigma;
	double log_w = 0.0;
	for (int k = 0; k < path.n_steps(); ++k) {
		const double r = path.alpha[k] / sig;
		log_w += -r * path.dw[k] - 0.5 * r * r * dt;
	}
	return std::exp(log_w);
}

std::optional<int> first_hit_tau_n(const SimPath& path, int n) {
	const double level = std::exp(static_cast<double>(n));
	for (int k = 0; k < static_cast<int>(path.x.size()); ++k)
		if (path.x[k] >= level) return k;
	return std::nullopt;
}

TruncationReport compare_truncations(const ModelParams& params,
                                     const TimeGrid& grid, int n, int n_paths,
                                     std::uint64_t seed, int jobs) {
	constexpr double kTol = 1e-12;
	TruncationReport rep;
	rep.n_paths = n_paths;
	rep.n_steps = grid.n_steps;

	ModelParams base = params;
	base.mu = MuSpec::logistic();
	ModelParams trunc_n = params;
	trunc_n.mu = MuSpec::truncated(n);
	ModelParams trunc_0 = params;
	trunc_0.mu = MuSpec::truncated(0);
	const FeedbackPolicy off = FeedbackPolicy::constant_z(0.0, base);
	// efforts off: compare pure dynamics under shared noise
	auto no_effort = [](double, double) { return 0.0; };

	struct Acc {
		long v_bn = 0, v_n0 = 0;
		double max_v = 0.0, sq_gap = 0.0;
		bool exact = true;
	};
	std::vector<Acc> acc(n_paths);

	parallel_for(
	    n_paths,
	    [&](std::size_t i) {
		    NormalDraws normals(make_stream(seed, i));
		    const double sq = std::sqrt(grid.dt());
		    std::vector<double> dw(grid.n_steps);
		    for (double& v : dw) v = sq * normals();
		    const SimPath pb = simulate_with_noise(base, grid, off, dw,
		                                           Measure::Tilted,
		                                           SdeScheme::LogEuler, no_effort);
		    const SimPath pn = simulate_with_noise(trunc_n, grid, off, dw,
		                                           Measure::Tilted,
		                                           SdeScheme::LogEuler, no_effort);
		    const SimPath p0 = simulate_with_noise(trunc_0, grid, off, dw,
		                                           Measure::Tilted,
		                                           SdeScheme::LogEuler, no_effort);
		    Acc a;
		    for (int k = 0; k <= grid.n_steps; ++k) {
			    if (pb.x[k] > pn.x[k] + kTol) {
				    ++a.v_bn;
				    a.max_v = std::max(a.max_v, pb.x[k] - pn.x[k]);
			    }
			    if (pn.x[k] > p0.x[k] + kTol) {
				    ++a.v_n0;
				    a.max_v = std::max(a.max_v, pn.x[k] - p0.x[k]);
			    }
			    if (pn.x[k] != pb.x[k]) a.exact = false;
		    }
		    const double g = pn.x[grid.n_steps] - pb.x[grid.n_steps];
		    a.sq_gap = g * g;
		    acc[i] = a;
	    },
	    jobs);

	for (const Acc& a : acc) {
		rep.violations_base_vs_n += a.v_bn;
		rep.violations_n_vs_0 += a.v_n0;
		rep.max_violation = std::max(rep.max_violation, a.max_v);
		rep.n_equals_base_exactly = rep.n_equals_base_exactly && a.exact;
		rep.mean_sq_terminal_gap += a.sq_gap;
	}
	if (n_paths > 0) rep.mean_sq_terminal_gap /= n_paths;
	return rep;
}

void export_path_csv(std::ostream& os, const SimPath& path) {
	os << "t,x,alpha,z,y,dw\n";
	char buf[160];
	for (size_t k = 0; k < path.t.size(); ++k) {
		const double y = k < path.y.size() ? path.y[k] : 0.0;
		std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n",
		              path.t[k], path.x[k], path.alpha[k], path.z[k], y,
		              path.dw[k]);
		os << buf;
	}
}

}  // namespace resreg
