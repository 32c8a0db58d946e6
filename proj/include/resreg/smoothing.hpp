#pragma once

////////////////////////////////////////////////////////////////////////////////
// The smoothing toolkit behind the regularized Hamiltonian: the compactly
// supported bump rho, its normalized cumulative Theta (tabulated once),
// smooth |.| / max / ternary max surrogates with certified sup-error <= eps/3,
// the mollified terminal cost f_n = f * rho_n, and the truncated competition
// mu_n used to bound the abundance before passing to the logistic limit.
////////////////////////////////////////////////////////////////////////////////

#include "resreg/params.hpp"

#include <array>
#include <vector>

namespace resreg::smoothing {

// rho(x) = exp(-1/(1-x^2)) on |x| < 1, zero outside.
double rho(double x);

// integral of rho over [-1,1] (adaptive quadrature, cached).
double rho_mass();

// Normalized mollifier of width 1/n: rho_n(x) = n rho(n x) / rho_mass().
double rho_n(double x, int n);

// Theta(u) = (1/rho_mass) * integral of rho over [-1, u]: smooth, monotone,
// exactly 0 below -1 and 1 above +1, and Theta(0) = 1/2 by symmetry.
// Evaluated from a 4096-knot table with monotone cubic interpolation.
double theta(double u);

// Smooth |x| surrogate: abs_eps(x) = |x| (Theta(-4x/eps - 3) + Theta(4x/eps - 3)).
// Coincides with |x| for |x| >= eps, vanishes for |x| <= eps/2, and never
// exceeds |x|.
double abs_eps(double x, double eps);

// max_eps(x, y) = (abs_eps(x - y) + x + y)/2; sup-error <= eps/3.
double max_eps(double x, double y, double eps);

// Ternary smooth max: max_eps(a, max_eps(b, c, eps/2), eps/2); the halved
// inner tolerance keeps the total sup-error <= eps/3.
double max3_eps(double a, double b, double c, double eps);

// Truncated competition mu_n(x) = x (Theta(x + e^n + 1) - Theta(x - (e^n + 1))):
// equals x on [-e^n, e^n], vanishes for |x| >= e^n + 2.
double mu_n(double x, int n);

// Mollified terminal cost f_n = f * rho_n: smooth, keeps the Lipschitz
// constant of f, equals f outside the 1/n-neighborhood of the kink at beta.
// Evaluation is a 64-point Gauss-Legendre pass over the kernel support,
// split at the kink when it falls inside the window.
class MollifiedCost {
public:
	MollifiedCost(CostSpec f, int n);
	double operator()(double x) const;

	const CostSpec& base() const { return f_; }
	int level() const { return n_; }

private:
	CostSpec f_;
	int n_;
	double width_;  // 1/n
};

MollifiedCost mollify_cost(const CostSpec& f, int n);

}  // namespace resreg::smoothing
