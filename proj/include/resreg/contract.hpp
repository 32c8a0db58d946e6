#pragma once

////////////////////////////////////////////////////////////////////////////////
// Pathwise reconstruction of the terminal tax. The promised value starts at
// the certainty-equivalent reservation r_tilde and accrues
//   dY = -(g(X, Z) + sigma^2 gamma Z^2/2 + Z (lambda - mu(X))) dt + Z dX/X,
// i.e. the tax is indexed purely on the observed abundance path. A second
// recursion driven by the simulated Brownian increments (valid when the
// recorded effort is the best response) cross-checks the discretization; a
// persistent gap between the two flags a too-coarse time grid.
////////////////////////////////////////////////////////////////////////////////

#include <cstdint>

#include "resreg/agent.hpp"
#include "resreg/dynamics.hpp"
#include "resreg/grid.hpp"
#include "resreg/params.hpp"
#include "resreg/policy.hpp"

namespace resreg {

struct ContractOutcome {
	double xi = 0.0;            // terminal tax, indexed (observable) form
	double xi_check = 0.0;      // increments form, best-response paths only
	double two_form_gap = 0.0;  // sup over the path of |Y - Y_check|
	bool flagged = false;       // gap exceeded the discretization allowance
	double x_T = 0.0;
	double principal_payoff = 0.0;  // xi - f(x_T)
	double agent_exponent = 0.0;    // sum (pi a - a^2/2) dt - xi
};

// Runs both recursions forward from Y_0 = r_tilde, fills path.y with the
// indexed form, and returns the outcome. Under an effort override the two
// forms genuinely differ (the indexed form is the contract); ignore the flag.
ContractOutcome reconstruct_tax(const ModelParams& params, SimPath& path,
                                double r_tilde);

// E[xi - f(X_T)] under the policy's best response, f unmollified.
McEstimate principal_value_mc(const ModelParams& params, const TimeGrid& grid,
                              const FeedbackPolicy& policy, int n_paths,
                              std::uint64_t seed, int jobs = 1);

}  // namespace resreg
