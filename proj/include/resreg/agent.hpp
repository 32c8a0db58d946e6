#pragma once

////////////////////////////////////////////////////////////////////////////////
// Agent-side closed forms. Facing a tax indexed on fluctuations with
// sensitivity z, the agent's inner optimization is the strictly concave
// q(a) = pi a - a^2/2 + a z over the effort interval [-m_lower, m_upper],
// so the best response is a projection (clamp) -- never a numerical solve.
////////////////////////////////////////////////////////////////////////////////

#include <cstdint>
#include <functional>

#include "resreg/grid.hpp"
#include "resreg/params.hpp"

namespace resreg {

struct McEstimate {
	double mean = 0.0;
	double se = 0.0;  // sample std / sqrt(n)
	int n = 0;
};

// Best-response effort: clamp(pi + z, -m_lower, m_upper).
double a_star(double pi, double z, const EffortBounds& b);

// Running decomposition coefficient g(x, z) = a^2/2 - pi a - a z evaluated at
// the best response a = a_star(pi(x), z); interior value -(pi + z)^2/2.
double g_running(double x, double z, const PriceSpec& price,
                 const EffortBounds& b);

// Utility of a saturated promise started at y0: -exp(gamma y0).
double agent_value_from_y0(double y0, double gamma);

class FeedbackPolicy;  // policy.hpp

// How the tax handed to the simulated agent is built.
//   Feedback: the pathwise reconstruction driven by tax_policy's z (the
//             actual contract; see contract.hpp)
//   None:     xi = 0 (baseline/diagnostic)
enum class TaxRule { Feedback, None };

// Simulates the agent under `effort` (clamped to the effort interval), hands
// it the reconstructed tax, and estimates E[-exp(-gamma (gain - xi))].
// `effort` is any (t, x) -> alpha map; pass nullptr to use the tax policy's
// own best response (the closure case).
McEstimate agent_utility_mc(const ModelParams& params, const TimeGrid& grid,
                            const FeedbackPolicy& tax_policy,
                            const std::function<double(double, double)>& effort,
                            int n_paths, std::uint64_t seed, int jobs = 1,
                            TaxRule rule = TaxRule::Feedback);

}  // namespace resreg
