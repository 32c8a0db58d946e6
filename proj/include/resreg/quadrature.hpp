#pragma once

// Gauss-Legendre rules (nodes computed once per order and cached) plus a
// small adaptive driver used where a certified tolerance is wanted.

#include <functional>
#include <vector>

namespace resreg::quad {

struct GaussLegendre {
	std::vector<double> x;  // nodes on [-1, 1]
	std::vector<double> w;  // weights
};

// Nodes/weights for an n-point rule, computed by Newton iteration on P_n.
const GaussLegendre& gauss_legendre(int n);

// Single-panel n-point rule on [a, b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 int n);

// Bisection-adaptive Gauss-Legendre: refines panels until the GL(15)/GL(31)
// discrepancy on each panel is below its share of tol.
double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double tol);

}  // namespace resreg::quad
