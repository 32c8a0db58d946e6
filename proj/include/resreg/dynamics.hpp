#pragma once

////////////////////////////////////////////////////////////////////////////////
// Controlled abundance dynamics. Effort enters as a measure tilt; simulation
// under the tilted measure inserts the drift directly in log coordinates:
//   log X_{k+1} = log X_k + (lambda - sigma^2/2 - mu(X_k) - alpha_k) dt
//               + sigma dW_k,
// which keeps every path strictly positive. A plain-X Euler scheme exists
// behind a flag solely for the strong-convergence study, and base-measure
// simulation (no drift insertion, efforts recorded for reweighting) supports
// the Girsanov cross-check.
////////////////////////////////////////////////////////////////////////////////

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "resreg/grid.hpp"
#include "resreg/params.hpp"
#include "resreg/policy.hpp"

namespace resreg {

struct SimPath {
	std::vector<double> t;      // n_steps + 1 knots
	std::vector<double> x;      // abundance
	std::vector<double> alpha;  // effort applied on [t_k, t_{k+1}) (last = repeat)
	std::vector<double> z;      // contract sensitivity along the path
	std::vector<double> y;      // promised value; filled by reconstruct_tax
	std::vector<double> dw;     // Brownian increments of the simulated measure
	std::uint64_t root_seed = 0;
	std::uint64_t index = 0;

	int n_steps() const { return static_cast<int>(t.size()) - 1; }
	double dt() const { return t[1] - t[0]; }
};

enum class Measure {
	Tilted,  // effort appears as drift; dw are W^alpha increments
	Base     // uncontrolled dynamics; effort only recorded, dw are W increments
};

enum class SdeScheme { LogEuler, PlainEuler };

// Draws its own noise from the (root_seed, path_index) stream.
// `effort_override`, when nonempty, replaces the policy's best response as the
// applied (and recorded) effort, clamped to the effort interval; z is still
// recorded from the policy. Used for perturbation studies.
SimPath simulate_controlled(
    const ModelParams& params, const TimeGrid& grid,
    const FeedbackPolicy& policy, std::uint64_t root_seed,
    std::uint64_t path_index, Measure measure = Measure::Tilted,
    SdeScheme scheme = SdeScheme::LogEuler,
    const std::function<double(double, double)>& effort_override = nullptr);

// Same, but driven by caller-provided Brownian increments (size n_steps).
SimPath simulate_with_noise(
    const ModelParams& params, const TimeGrid& grid,
    const FeedbackPolicy& policy, const std::vector<double>& dw,
    Measure measure = Measure::Tilted, SdeScheme scheme = SdeScheme::LogEuler,
    const std::function<double(double, double)>& effort_override = nullptr);

// Uncontrolled logistic solution on the grid for the given increments:
//   X_t = x0 e^{(lambda - sigma^2/2) t + sigma W_t}
//       / (1 + x0 * integral_0^t e^{(lambda - sigma^2/2) s + sigma W_s} ds),
// the time integral approximated by the trapezoid rule on the grid.
// Requires the logistic mu variant (the closed form is specific to mu(x) = x).
std::vector<double> exact_logistic(const ModelParams& params,
                                   const TimeGrid& grid,
                                   const std::vector<double>& dw);

// Discretized change-of-measure weight from a base-measure path:
//   exp(-sum alpha_k dW_k / sigma - 1/2 sum (alpha_k/sigma)^2 dt).
// E[weight] = 1, and E[weight * F(X)] estimates the tilted expectation.
double girsanov_weight(const SimPath& path, const ModelParams& params);

// First grid index with x >= e^n, if any.
std::optional<int> first_hit_tau_n(const SimPath& path, int n);

// Shared-noise comparison of the logistic model against its truncations
// mu_n and mu_0 (efforts off). Orderings X <= X^{mu_n} <= X^{mu_0} are
// counted as violated only beyond a 1e-12 slack.
struct TruncationReport {
	int n_paths = 0;
	int n_steps = 0;
	long violations_base_vs_n = 0;  // X > X^{mu_n} + tol
	long violations_n_vs_0 = 0;     // X^{mu_n} > X^{mu_0} + tol
	double max_violation = 0.0;
	bool n_equals_base_exactly = true;  // bitwise, holds when no path nears e^n
	double mean_sq_terminal_gap = 0.0;  // E|X^{mu_n}_T - X_T|^2
};

TruncationReport compare_truncations(const ModelParams& params,
                                     const TimeGrid& grid, int n, int n_paths,
                                     std::uint64_t seed, int jobs = 1);

// CSV with header t,x,alpha,z,y,dw.
void export_path_csv(std::ostream& os, const SimPath& path);

}  // namespace resreg
