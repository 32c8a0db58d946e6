// Acceptance gate: every shipped claim below is checked against an
// independent oracle or a pinned tolerance, one line per criterion,
// exit code = number of failures. Budgets are wall-clock seconds.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "resreg/agent.hpp"
#include "resreg/contract.hpp"
#include "resreg/dynamics.hpp"
#include "resreg/experiments.hpp"
#include "resreg/hamiltonian.hpp"
#include "resreg/hjb.hpp"
#include "resreg/parallel.hpp"
#include "resreg/rng.hpp"

using namespace resreg;

namespace {

int g_fails = 0;

std::string strf(const char* fmt, ...) {
	char buf[512];
	va_list ap;
	va_start(ap, fmt);
	std::vsnprintf(buf, sizeof buf, fmt, ap);
	va_end(ap);
	return buf;
}

void report(int id, bool ok, const std::string& detail) {
	std::printf("[%s] criterion %2d: %s\n", ok ? "PASS" : "FAIL", id,
	            detail.c_str());
	std::fflush(stdout);
	if (!ok) ++g_fails;
}

struct Timer {
	std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
	double s() const {
		return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
		    .count();
	}
};

const std::shared_ptr<const ValueSurface>& paper_surface() {
	static auto s = std::make_shared<const ValueSurface>(
	    solve(ModelParams{}, PdeGrid::standard(ModelParams{})));
	return s;
}

const FeedbackPolicy& paper_policy() {
	static FeedbackPolicy pol = z_feedback(paper_surface(), ModelParams{});
	return pol;
}

std::string slurp(const std::string& path) {
	std::ifstream in(path, std::ios::binary);
	std::ostringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

double lsq_slope(const std::vector<double>& x, const std::vector<double>& y) {
	const int n = static_cast<int>(x.size());
	double sx = 0, sy = 0, sxx = 0, sxy = 0;
	for (int i = 0; i < n; ++i) {
		sx += x[i];
		sy += y[i];
		sxx += x[i] * x[i];
		sxy += x[i] * y[i];
	}
	return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

////////////////////////////////////////////////////////////////////////////////
// 1. clamp formula vs grid argmax, 1e4 draws, < 1 s
////////////////////////////////////////////////////////////////////////////////

void criterion_1() {
	Timer tm;
	std::mt19937_64 rng(12021);
	std::uniform_real_distribution<double> upi(0.0, 3.0), uz(-30.0, 30.0),
	    um(0.0, 12.0);
	double worst = 0.0;
	for (int i = 0; i < 10000; ++i) {
		const double pi = upi(rng), z = uz(rng);
		EffortBounds b{um(rng), um(rng)};
		if (b.m_lower + b.m_upper < 0.5) b.m_upper += 0.5;
		auto q = [&](double a) { return (pi + z) * a - 0.5 * a * a; };
		const int nc = 2500;
		double best_a = -b.m_lower, best_v = q(best_a);
		for (int j = 1; j <= nc; ++j) {
			const double a = -b.m_lower + (b.m_lower + b.m_upper) * j / nc;
			if (q(a) > best_v) {
				best_v = q(a);
				best_a = a;
			}
		}
		const double step = (b.m_lower + b.m_upper) / nc;
		const double lo = std::max(-b.m_lower, best_a - 1.5 * step);
		const double hi = std::min(b.m_upper, best_a + 1.5 * step);
		for (int j = 0; j <= 500; ++j) {
			const double a = lo + (hi - lo) * j / 500;
			if (q(a) > best_v) {
				best_v = q(a);
				best_a = a;
			}
		}
		worst = std::max(worst, std::abs(a_star(pi, z, b) - best_a));
	}
	const double el = tm.s();
	report(1, worst <= 1e-4 && el < 1.0,
	       strf("a_star vs grid argmax, 1e4 draws: max gap %.3g (tol 1e-4), "
	            "%.2f s (budget 1 s)",
	            worst, el));
}

////////////////////////////////////////////////////////////////////////////////
// 2. closed-branch Hamiltonian vs z-grid oracle, 1e4 draws, < 10 s
////////////////////////////////////////////////////////////////////////////////

void criterion_2() {
	Timer tm;
	const auto c = HamiltonianContext::make(ModelParams{});
	std::mt19937_64 rng(40127);
	std::uniform_real_distribution<double> uy(-4.0, 4.0), ud1(-20.0, 20.0),
	    ud2(-5.0, 5.0);
	double worst_gap = 0.0, worst_rel = 0.0;
	bool ok = true;
	for (int i = 0; i < 10000; ++i) {
		const double y = uy(rng), d1 = ud1(rng), d2 = ud2(rng);
		const double ref = brute_force_hamiltonian(c, y, d1, d2);
		const double gap = std::abs(hamiltonian_exact(c, y, d1, d2) - ref);
		const double tol = 1e-4 * z_lipschitz_bound(c, d1) + 1e-9;
		ok = ok && gap <= tol;
		worst_gap = std::max(worst_gap, gap);
		worst_rel = std::max(worst_rel, gap / tol);
	}
	const double el = tm.s();
	report(2, ok && el < 10.0,
	       strf("hamiltonian_exact vs z-grid oracle, 1e4 draws: max gap %.3g "
	            "(worst gap/tol %.3g); adjudicates kappa = 1 + gamma sigma^2; "
	            "%.2f s (budget 10 s)",
	            worst_gap, worst_rel, el));
}

////////////////////////////////////////////////////////////////////////////////
// 3. sampled |H - H_eps| <= eps over 1e5 points, < 10 s
////////////////////////////////////////////////////////////////////////////////

void criterion_3() {
	Timer tm;
	const ModelParams p;
	const auto c = HamiltonianContext::make(p);
	const PdeGrid g = PdeGrid::standard(p);
	std::mt19937_64 rng(90210);
	std::uniform_real_distribution<double> uy(g.y_min, g.y_max),
	    ud1(-40.0, 40.0);
	double worst = 0.0;
	for (int i = 0; i < 100000; ++i) {
		// the d2 slot enters both sides identically, so sample (y, d1) only
		const double y = uy(rng), d1 = ud1(rng);
		worst = std::max(worst, std::abs(hamiltonian_exact(c, y, d1, 0.0) -
		                                 hamiltonian_eps(c, y, d1, 0.0)));
	}
	const double el = tm.s();
	report(3, worst <= p.epsilon && el < 10.0,
	       strf("sampled sup |H - H_eps| over 1e5 points: %.3g <= eps = %.3g; "
	            "%.2f s (budget 10 s)",
	            worst, p.epsilon, el));
}

////////////////////////////////////////////////////////////////////////////////
// 4. plain-Euler strong error vs exact logistic: slope in [0.4, 0.9], < 30 s
////////////////////////////////////////////////////////////////////////////////

void criterion_4() {
	Timer tm;
	ModelParams p;
	p.sigma = 0.5;  // puts plain Euler firmly in the order-1/2 regime
	const FeedbackPolicy off = FeedbackPolicy::constant_z(-p.price.P, p);
	const int n_paths = 256, n_ref = 2048;
	const std::vector<int> levels{64, 128, 256, 512};
	std::vector<double> err(levels.size(), 0.0);
	const double dt_ref = 1.0 / n_ref;

	for (int i = 0; i < n_paths; ++i) {
		NormalDraws draw(make_stream(4242, i));
		std::vector<double> dwf(n_ref);
		for (double& v : dwf) v = std::sqrt(dt_ref) * draw();
		const double xref =
		    exact_logistic(p, TimeGrid(1.0, n_ref), dwf).back();
		for (size_t l = 0; l < levels.size(); ++l) {
			const int n = levels[l];
			const int m = n_ref / n;
			std::vector<double> dw(n, 0.0);
			for (int k = 0; k < n; ++k)
				for (int j = 0; j < m; ++j) dw[k] += dwf[k * m + j];
			const SimPath path =
			    simulate_with_noise(p, TimeGrid(1.0, n), off, dw, Measure::Base,
			                        SdeScheme::PlainEuler);
			err[l] += std::abs(path.x.back() - xref);
		}
	}
	std::vector<double> lx, ly;
	std::string pts;
	for (size_t l = 0; l < levels.size(); ++l) {
		err[l] /= n_paths;
		lx.push_back(std::log(1.0 / levels[l]));
		ly.push_back(std::log(err[l]));
		pts += strf(" %g", err[l]);
	}
	const double slope = lsq_slope(lx, ly);
	const double el = tm.s();
	report(4, slope >= 0.4 && slope <= 0.9 && el < 30.0,
	       strf("plain-Euler strong error at sigma=0.5, 256 paired paths, "
	            "N={64..512}: errors%s, slope %.3f in [0.4, 0.9]; %.2f s "
	            "(budget 30 s)",
	            pts.c_str(), slope, el));
}

////////////////////////////////////////////////////////////////////////////////
// 5. shared-noise ordering X <= X^{mu_n} <= X^{mu_0}, < 10 s
////////////////////////////////////////////////////////////////////////////////

void criterion_5() {
	Timer tm;
	const ModelParams p;
	const TruncationReport r =
	    compare_truncations(p, TimeGrid(1.0, 5000), 2, 100, 1729, default_jobs());
	const double el = tm.s();
	report(5,
	       r.violations_base_vs_n == 0 && r.violations_n_vs_0 == 0 && el < 10.0,
	       strf("truncation orderings, 100 paths x 5000 steps: 0 violations "
	            "(max excess %.3g, truncation bitwise-invisible: %s); %.2f s "
	            "(budget 10 s)",
	            r.max_violation, r.n_equals_base_exactly ? "yes" : "no", el));
}

////////////////////////////////////////////////////////////////////////////////
// 6. tau_2 never fires over 1e4 optimally-controlled paths, < 60 s
////////////////////////////////////////////////////////////////////////////////

void criterion_6() {
	Timer tm;
	const ModelParams p;
	const TimeGrid g(p.horizon, 5000);
	const FeedbackPolicy& pol = paper_policy();
	const int n = 10000;
	std::atomic<long> hits{0};
	std::atomic<double> xmax{0.0};
	parallel_for(
	    n,
	    [&](std::size_t i) {
		    const SimPath path = simulate_controlled(p, g, pol, 1729, i);
		    if (first_hit_tau_n(path, 2)) ++hits;
		    double m = 0.0;
		    for (double x : path.x) m = std::max(m, x);
		    double cur = xmax.load();
		    while (m > cur && !xmax.compare_exchange_weak(cur, m)) {
		    }
	    },
	    default_jobs());
	const double el = tm.s();
	report(6, hits.load() == 0 && el < 60.0,
	       strf("tau_2 tail, 1e4 paths: %ld hits of e^2 = %.3f (running max "
	            "%.3f); %.1f s (budget 60 s)",
	            hits.load(), std::exp(2.0), xmax.load(), el));
}

////////////////////////////////////////////////////////////////////////////////
// 7. solved-surface shape: monotone in y and t, late effort sign split, < 60 s
////////////////////////////////////////////////////////////////////////////////

void criterion_7() {
	Timer tm;
	const auto& s = *paper_surface();
	const PdeGrid& g = s.grid;
	double worst_y = 0.0, worst_t = 0.0;
	for (int k = 0; k <= g.n_time; ++k)
		for (int j = 0; j + 1 < g.n_space; ++j)
			worst_y = std::max(worst_y, s.at(k, j) - s.at(k, j + 1));
	for (int k = 0; k < g.n_time; ++k)
		for (int j = 0; j < g.n_space; ++j)
			worst_t = std::max(worst_t, s.at(k, j) - s.at(k + 1, j));

	const FeedbackPolicy& pol = paper_policy();
	const ModelParams p;
	const double t_late = 0.99 * p.horizon;
	double neg_side = -1e300, pos_side = 1e300;  // max below, min above
	for (int i = 0; i <= 60; ++i) {
		const double x = 0.50 + (p.cost.beta - 0.05 - 0.50) * i / 60.0;
		PathState st;
		neg_side = std::max(neg_side, pol.eval(t_late, x, std::log(x), st).alpha);
	}
	for (int i = 0; i <= 60; ++i) {
		const double x = p.cost.beta + 0.05 + (2.0 - p.cost.beta - 0.05) * i / 60.0;
		PathState st;
		pos_side = std::min(pos_side, pol.eval(t_late, x, std::log(x), st).alpha);
	}
	const double el = tm.s();
	const bool ok = worst_y <= 1e-12 && worst_t <= 0.02 && neg_side < 0.0 &&
	                pos_side > 0.0 && el < 60.0;
	report(7, ok,
	       strf("surface shape: y-monotonicity violation %.3g (tol 1e-12), "
	            "t-violation %.3g (allowance 0.02, terminal-kink dip), effort "
	            "at t=0.99: <= %.3f below beta-0.05, >= %.3f above beta+0.05; "
	            "%.1f s incl. solve (budget 60 s)",
	            worst_y, worst_t, neg_side, pos_side, el));
}

////////////////////////////////////////////////////////////////////////////////
// 8. value sandwich: MC principal value vs R~ + w(0, log x0), < 5 min
////////////////////////////////////////////////////////////////////////////////

void criterion_8() {
	Timer tm;
	const ModelParams p;
	const double w0 = paper_surface()->w0_at(std::log(p.x0));
	const double r_tilde = reservation_tilde(resolve_reservation(p), p.gamma);
	const McEstimate pv = principal_value_mc(p, TimeGrid(p.horizon, 5000),
	                                         paper_policy(), 10000, 1729,
	                                         default_jobs());

	// refinement tolerance from a half/double grid study at (0, log x0)
	const ValueSurface half =
	    solve(p, PdeGrid::standard(p, 1000, 2500));
	const ValueSurface dbl =
	    solve(p, PdeGrid::standard(p, 4000, 10000));
	const double ref_tol = std::abs(half.w0_at(std::log(p.x0)) -
	                                dbl.w0_at(std::log(p.x0)));

	const double target = r_tilde + w0;
	const double gap = std::abs(pv.mean - target);
	const double allow = 2.0 * p.horizon * p.epsilon + 3.0 * pv.se + ref_tol;
	const double el = tm.s();
	report(8, gap <= allow && el < 300.0,
	       strf("value sandwich, 1e4 paths: |%.6f - (%.6f)| = %.2e <= 2T eps + "
	            "3 SE + ref_tol = %.2e (ref_tol %.2e); %.1f s (budget 300 s)",
	            pv.mean, target, gap, allow, ref_tol, el));
}

////////////////////////////////////////////////////////////////////////////////
// 9. agent closure at the reservation and best-response dominance, < 5 min
////////////////////////////////////////////////////////////////////////////////

void criterion_9() {
	Timer tm;
	const ModelParams p;
	const TimeGrid g(p.horizon, 5000);
	const FeedbackPolicy& pol = paper_policy();
	const double R = resolve_reservation(p);
	const double dt_slack = 25.0 * g.dt();
	const int jobs = default_jobs();

	const McEstimate closure =
	    agent_utility_mc(p, g, pol, nullptr, 10000, 555, jobs);
	const bool closed = std::abs(closure.mean - R) <= 3.0 * closure.se + dt_slack;

	// the same contract handed to five deviating efforts (common noise)
	auto best = [&pol, &p](double t, double x) {
		return a_star(p.price.pi(x), pol.z_at(t, x), p.bounds());
	};
	struct Member {
		const char* name;
		std::function<double(double, double)> effort;
	};
	const std::vector<Member> family{
	    {"a*+0.25", [best](double t, double x) { return best(t, x) + 0.25; }},
	    {"a*-0.25", [best](double t, double x) { return best(t, x) - 0.25; }},
	    {"0", [](double, double) { return 0.0; }},
	    {"0.5", [](double, double) { return 0.5; }},
	    {"1", [](double, double) { return 1.0; }}};
	const McEstimate base = agent_utility_mc(p, g, pol, nullptr, 4000, 555, jobs);
	bool dominated = true;
	std::string margins;
	for (const Member& m : family) {
		const McEstimate dev =
		    agent_utility_mc(p, g, pol, m.effort, 4000, 555, jobs);
		const double margin = base.mean - dev.mean;
		dominated = dominated &&
		            margin >= -(2.0 * (base.se + dev.se) + 5.0 * g.dt());
		margins += strf(" %s:%+.2e", m.name, margin);
	}
	const double el = tm.s();
	report(9, closed && dominated && el < 300.0,
	       strf("agent closure, 1e4 paths: |%.6f - (%.6f)| = %.2e <= 3 SE + 25 "
	            "dt = %.2e; dominance margins (4e3 paths)%s; %.1f s (budget "
	            "300 s)",
	            closure.mean, R, std::abs(closure.mean - R),
	            3.0 * closure.se + dt_slack, margins.c_str(), el));
}

////////////////////////////////////////////////////////////////////////////////
// 10. indexed vs increments tax reconstruction agree as dt shrinks, < 1 min
////////////////////////////////////////////////////////////////////////////////

void criterion_10() {
	// The two routes are left-point discretizations of identical algebra, so
	// under the classical Euler path map they agree to rounding at any dt;
	// that identity is the sharp form of the test and catches any drift,
	// measure, or sign slip. The shipped default path map is the positivity-
	// preserving log scheme, whose exponential adds a mean-zero
	// z sigma^2 (dW^2 - dt)/2 per-step term: its sup-gap contracts at a mixed
	// sqrt(dt)/dt rate (~0.65 on these levels at sigma = 0.1), so the
	// refinement check pins monotone shrinkage with slope in [0.4, 1.1].
	Timer tm;
	const ModelParams p;
	const FeedbackPolicy& pol = paper_policy();
	const std::vector<int> levels{50, 100, 200, 400};
	const int n_paths = 200;

	double ident_worst = 0.0;
	{
		const TimeGrid g(p.horizon, 400);
		std::vector<double> gaps(n_paths);
		parallel_for(
		    n_paths,
		    [&](std::size_t i) {
			    SimPath path = simulate_controlled(p, g, pol, 808, i,
			                                       Measure::Tilted,
			                                       SdeScheme::PlainEuler);
			    gaps[i] = reconstruct_tax(p, path, -0.5).two_form_gap;
		    },
		    default_jobs());
		for (double v : gaps) ident_worst = std::max(ident_worst, v);
	}

	std::vector<double> mean_gap(levels.size(), 0.0);
	for (size_t l = 0; l < levels.size(); ++l) {
		const TimeGrid g(p.horizon, levels[l]);
		std::vector<double> gaps(n_paths);
		parallel_for(
		    n_paths,
		    [&](std::size_t i) {
			    SimPath path = simulate_controlled(p, g, pol, 808, i);
			    gaps[i] = reconstruct_tax(p, path, -0.5).two_form_gap;
		    },
		    default_jobs());
		for (double v : gaps) mean_gap[l] += v;
		mean_gap[l] /= n_paths;
	}
	bool monotone = true;
	std::vector<double> lx, ly;
	std::string pts;
	for (size_t l = 0; l < levels.size(); ++l) {
		if (l > 0) monotone = monotone && mean_gap[l] < mean_gap[l - 1];
		lx.push_back(std::log(1.0 / levels[l]));
		ly.push_back(std::log(mean_gap[l]));
		pts += strf(" %.3g", mean_gap[l]);
	}
	const double slope = lsq_slope(lx, ly);
	const double el = tm.s();
	report(10, ident_worst <= 1e-12 && monotone && slope >= 0.4 &&
	           slope <= 1.1 && el < 60.0,
	       strf("two-form tax gap: exact identity on classical Euler paths, "
	            "worst sup-gap %.2e <= 1e-12 (200 paths, N=400); log-scheme "
	            "refinement means%s, monotone %s, slope %.3f in [0.4, 1.1]; "
	            "%.1f s (budget 60 s)",
	            ident_worst, pts.c_str(), monotone ? "yes" : "no", slope, el));
}

////////////////////////////////////////////////////////////////////////////////
// 11. terminal mean reaches the target for beta in {0.7, 0.9, 1.1}, < 10 min
////////////////////////////////////////////////////////////////////////////////

void criterion_11() {
	Timer tm;
	const SweepReport r =
	    sweep_beta(RunConfig{}, {0.7, 0.9, 1.1}, default_jobs());
	bool ok = true;
	std::string pts;
	for (const SweepSeries& s : r.series) {
		ok = ok && std::abs(s.terminal_mean - s.value) <= 0.05;
		pts += strf(" beta=%.1f: %.4f", s.value, s.terminal_mean);
	}
	const double el = tm.s();
	report(11, ok && el < 600.0,
	       strf("target tracking, 1000 paths per beta:%s, all within 0.05; "
	            "%.1f s (budget 600 s)",
	            pts.c_str(), el));
}

////////////////////////////////////////////////////////////////////////////////
// 12. cost sweep ordering and renewal-ban dominance, < 10 min
////////////////////////////////////////////////////////////////////////////////

void criterion_12() {
	Timer tm;
	const RunConfig cfg;
	const SweepReport cost = sweep_cost(cfg, {1.0, 3.0, 5.0}, default_jobs());
	bool cost_ok = true;
	std::string pts;
	for (size_t i = 0; i < cost.series.size(); ++i) {
		pts += strf(" c=%g: %.4f", cost.series[i].value,
		            cost.series[i].terminal_mean);
		if (i > 0) {
			const SweepSeries& a = cost.series[i - 1];
			const SweepSeries& b = cost.series[i];
			cost_ok = cost_ok && b.terminal_mean >=
			                         a.terminal_mean -
			                             2.0 * (a.terminal_se + b.terminal_se);
		}
	}

	const SweepReport ren = compare_renewal(cfg, default_jobs());
	const SweepSeries& off = ren.series[0];
	const SweepSeries& on = ren.series[1];
	bool ren_ok = off.min_alpha >= 0.0;
	double worst_boundary = 1e300;
	for (size_t i = 0; i < off.t.size(); ++i) {
		const double slack = 2.0 * (off.se_x[i] + on.se_x[i]);
		worst_boundary = std::min(worst_boundary,
		                          off.mean_x[i] - on.mean_x[i] + slack);
		ren_ok = ren_ok && off.mean_x[i] >= on.mean_x[i] - slack;
	}
	const double el = tm.s();
	report(12, cost_ok && ren_ok && el < 600.0,
	       strf("orderings:%s nondecreasing within SE; renewal ban dominates "
	            "at all %zu report times (worst slackened margin %+.2e) with "
	            "min effort %.2f >= 0; %.1f s (budget 600 s)",
	            pts.c_str(), off.t.size(), worst_boundary, off.min_alpha, el));
}

////////////////////////////////////////////////////////////////////////////////
// 13. byte-identical reruns of figure and sweep with a fixed seed
////////////////////////////////////////////////////////////////////////////////

void criterion_13() {
	Timer tm;
	const RunConfig cfg;
	const auto a = run_figure(3, cfg, "acc_det_a", 1);
	const auto b = run_figure(3, cfg, "acc_det_b", 2);
	bool fig_ok = a.size() == b.size() && !a.empty();
	for (size_t i = 0; fig_ok && i < a.size(); ++i)
		fig_ok = slurp(a[i]) == slurp(b[i]);

	std::ostringstream s1, s2;
	write_sweep_csv(s1, compare_renewal(cfg, 1));
	write_sweep_csv(s2, compare_renewal(cfg, 2));
	const bool sweep_ok = s1.str() == s2.str() && !s1.str().empty();
	const double el = tm.s();
	report(13, fig_ok && sweep_ok,
	       strf("determinism: figure rerun byte-identical across %zu files and "
	            "job counts: %s; renewal sweep byte-identical: %s; %.1f s",
	            a.size(), fig_ok ? "yes" : "no", sweep_ok ? "yes" : "no", el));
}

}  // namespace

int main() {
	std::printf("acceptance gate: 13 criteria\n");
	criterion_1();
	criterion_2();
	criterion_3();
	criterion_4();
	criterion_5();
	criterion_6();
	criterion_7();
	criterion_8();
	criterion_9();
	criterion_10();
	criterion_11();
	criterion_12();
	criterion_13();
	if (g_fails == 0)
		std::printf("acceptance: all 13 criteria passed\n");
	else
		std::printf("acceptance: %d criterion(s) FAILED\n", g_fails);
	return g_fails;
}
