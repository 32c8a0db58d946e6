#pragma once

#include <stdexcept>

namespace resreg {

// Uniform time grid on [0, horizon] with n_steps intervals.
struct TimeGrid {
	double horizon = 1.0;
	int n_steps = 5000;

	double dt() const { return horizon / n_steps; }
	double time(int k) const { return horizon * k / n_steps; }

	TimeGrid() = default;
	TimeGrid(double T, int n) : horizon(T), n_steps(n) {
		if (!(T > 0.0) || n < 1)
			throw std::invalid_argument("TimeGrid: need horizon > 0, n_steps >= 1");
	}
};

}  // namespace resreg
