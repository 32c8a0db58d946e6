#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "resreg/dynamics.hpp"

using namespace resreg;

namespace {

// logistic ODE solution for the zero-noise drift nu = lambda - sigma^2/2:
// x(t) = x0 e^{nu t} / (1 + x0 (e^{nu t} - 1)/nu)
double ode_logistic(double x0, double nu, double t) {
	const double e = std::exp(nu * t);
	return x0 * e / (1.0 + x0 * (e - 1.0) / nu);
}

FeedbackPolicy off_policy(const ModelParams& p) {
	// z = -P pushes the clamped best response to exactly zero effort
	return FeedbackPolicy::constant_z(-p.price.P, p);
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("exact_logistic reproduces the noise-free closed form") {
	ModelParams p;
	const TimeGrid g(1.0, 5000);
	const std::vector<double> dw(g.n_steps, 0.0);
	const auto x = exact_logistic(p, g, dw);
	REQUIRE(static_cast<int>(x.size()) == g.n_steps + 1);
	const double nu = p.lambda - 0.5 * p.sigma * p.sigma;
	CHECK(x[0] == doctest::Approx(1.2));
	for (int k : {1000, 2500, 5000})
		CHECK(x[k] ==
		      doctest::Approx(ode_logistic(p.x0, nu, g.time(k))).epsilon(1e-6));
}

TEST_CASE("exact_logistic guards its preconditions") {
	ModelParams p;
	const TimeGrid g(1.0, 100);
	std::vector<double> dw(99, 0.0);
	CHECK_THROWS_AS(exact_logistic(p, g, dw), std::invalid_argument);
	dw.push_back(0.0);
	p.mu = MuSpec::truncated(2);
	CHECK_THROWS_AS(exact_logistic(p, g, dw), std::invalid_argument);
}

TEST_CASE("zero-noise log-Euler converges to the same ODE") {
	ModelParams p;
	const TimeGrid g(1.0, 2000);
	const std::vector<double> dw(g.n_steps, 0.0);
	const SimPath path = simulate_with_noise(p, g, off_policy(p), dw);
	for (double a : path.alpha) CHECK(a == 0.0);
	const double nu = p.lambda - 0.5 * p.sigma * p.sigma;
	CHECK(std::abs(path.x.back() - ode_logistic(p.x0, nu, 1.0)) <= 2e-3);
}

TEST_CASE("plain and log Euler agree at small dt, and plain can die") {
	ModelParams p;
	const TimeGrid g(1.0, 4000);
	const SimPath a = simulate_controlled(p, g, off_policy(p), 11, 0,
	                                      Measure::Tilted, SdeScheme::LogEuler);
	const SimPath b = simulate_with_noise(p, g, off_policy(p), a.dw,
	                                      Measure::Tilted, SdeScheme::PlainEuler);
	CHECK(std::abs(a.x.back() - b.x.back()) <= 2e-3);

	// violent noise on a coarse grid drives the plain scheme negative
	ModelParams q;
	q.sigma = 3.0;
	const TimeGrid coarse(1.0, 4);
	bool died = false;
	for (std::uint64_t idx = 0; idx < 50 && !died; ++idx) {
		try {
			simulate_controlled(q, coarse, off_policy(q), 3, idx, Measure::Tilted,
			                    SdeScheme::PlainEuler);
		} catch (const std::runtime_error& e) {
			died = true;
			CHECK(std::string(e.what()) ==
			      "plain Euler lost positivity; use the log scheme");
		}
	}
	CHECK(died);

	// the log scheme never leaves (0, inf) on the same inputs
	for (std::uint64_t idx = 0; idx < 50; ++idx) {
		const SimPath lp = simulate_controlled(q, coarse, off_policy(q), 3, idx);
		for (double x : lp.x) CHECK(x > 0.0);
	}
}

TEST_CASE("per-path streams: reproducible, index-separated, replayable") {
	ModelParams p;
	const TimeGrid g(1.0, 200);
	const FeedbackPolicy pol = FeedbackPolicy::constant_z(0.0, p);
	const SimPath a = simulate_controlled(p, g, pol, 7, 3);
	const SimPath b = simulate_controlled(p, g, pol, 7, 3);
	CHECK(a.x == b.x);
	CHECK(a.dw == b.dw);

	const SimPath c = simulate_controlled(p, g, pol, 7, 4);
	CHECK(a.dw != c.dw);

	const SimPath r = simulate_with_noise(p, g, pol, a.dw);
	CHECK(r.x == a.x);
}

TEST_CASE("girsanov weight: identity at zero effort, mean one, consistency") {
	ModelParams p;
	const TimeGrid g(1.0, 500);

	const SimPath idle =
	    simulate_controlled(p, g, off_policy(p), 5, 0, Measure::Base);
	CHECK(girsanov_weight(idle, p) == doctest::Approx(1.0));

	// constant effort 0.05 via z = 0.05 - P
	const FeedbackPolicy pol = FeedbackPolicy::constant_z(0.05 - p.price.P, p);
	const int n = 800;
	double wsum = 0.0, wsq = 0.0, fw = 0.0, fwsq = 0.0, ts = 0.0, tsq = 0.0;
	for (int i = 0; i < n; ++i) {
		SimPath base = simulate_controlled(p, g, pol, 21, i, Measure::Base);
		CHECK(base.alpha[3] == doctest::Approx(0.05));
		const double w = girsanov_weight(base, p);
		wsum += w;
		wsq += w * w;
		const double v = w * base.x.back();
		fw += v;
		fwsq += v * v;
		SimPath tilt = simulate_controlled(p, g, pol, 22, i, Measure::Tilted);
		ts += tilt.x.back();
		tsq += tilt.x.back() * tilt.x.back();
	}
	auto se = [n](double s, double sq) {
		const double m = s / n;
		return std::sqrt((sq / n - m * m) / (n - 1.0));
	};
	CHECK(std::abs(wsum / n - 1.0) <= 3.0 * se(wsum, wsq) + 1e-3);
	// reweighted base-measure estimate vs direct tilted simulation
	CHECK(std::abs(fw / n - ts / n) <=
	      3.0 * (se(fw, fwsq) + se(ts, tsq)) + 2e-3);
}

TEST_CASE("shared-noise truncation orderings hold without violations") {
	ModelParams p;
	const TimeGrid g(1.0, 2000);
	const TruncationReport r = compare_truncations(p, g, 2, 100, 1729);
	CHECK(r.n_paths == 100);
	CHECK(r.violations_base_vs_n == 0);
	CHECK(r.violations_n_vs_0 == 0);
	CHECK(r.max_violation <= 1e-12);
	// paper-parameter paths never approach e^2, so the truncation is invisible
	CHECK(r.n_equals_base_exactly);
	CHECK(r.mean_sq_terminal_gap == doctest::Approx(0.0));
}

TEST_CASE("first_hit_tau_n scans the path") {
	SimPath path;
	path.t = {0.0, 0.5, 1.0};
	path.x = {1.0, 8.0, 9.0};
	const auto hit = first_hit_tau_n(path, 2);  // e^2 = 7.39
	REQUIRE(hit.has_value());
	CHECK(*hit == 1);
	CHECK(!first_hit_tau_n(path, 3).has_value());
}

}  // TEST_SUITE
