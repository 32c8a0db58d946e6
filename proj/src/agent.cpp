#include "resreg/agent.hpp"

#include <algorithm>
#include <cmath>

namespace resreg {

double a_star(double pi, double z, const EffortBounds& b) {
	return std::clamp(pi + z, -b.m_lower, b.m_upper);
}

double g_running(double x, double z, const PriceSpec& price,
                 const EffortBounds& b) {
	const double pi = price.pi(x);
	const double a = a_star(pi, z, b);
	return 0.5 * a * a - pi * a - a * z;
}

double agent_value_from_y0(double y0, double gamma) {
	return -std::exp(gamma * y0);
}

}  // namespace resreg
