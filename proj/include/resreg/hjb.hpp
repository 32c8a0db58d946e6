#pragma once

////////////////////////////////////////////////////////////////////////////////
// Backward solve of  -w_t - H(y, w_y, w_yy) = 0,  w(T, y) = -f(e^y)  on a
// uniform log-abundance grid. Explicit Euler with per-node upwinded first
// differences (direction from the sign of the effective drift at the
// candidate maximizing effort) and central second differences; boundary rows
// evolve with the second difference forced to zero (linear extrapolation).
// A CFL certificate gates the explicit scheme; an IMEX variant treats the
// diffusion implicitly for stiffer parameter sets.
////////////////////////////////////////////////////////////////////////////////

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

#include "resreg/hamiltonian.hpp"
#include "resreg/params.hpp"
#include "resreg/policy.hpp"

namespace resreg {

struct PdeGrid {
	double y_min = 0.0;
	double y_max = 0.0;
	int n_space = 0;
	int n_time = 0;
	double horizon = 0.0;

	double dy() const { return (y_max - y_min) / (n_space - 1); }
	double dt() const { return horizon / n_time; }
	double y(int j) const { return y_min + dy() * j; }
	double t(int k) const { return horizon * k / n_time; }

	// Default domain: log x0 +- (6 sigma sqrt(T) + |lambda| T + 1), widened
	// below by m_lower T (renewal-driven excursions), plus y_pad on both ends.
	static PdeGrid standard(const ModelParams& p, int n_space = 2000,
	                        int n_time = 5000, double y_pad = 0.0);
};

void validate(const PdeGrid& g, const ModelParams& p);

enum class HamMode { Eps, Exact };
enum class CostMode { Raw, Mollified };
enum class TimeScheme { Explicit, Imex };

struct SolveOptions {
	HamMode mode = HamMode::Eps;
	CostMode cost_mode = CostMode::Raw;
	int mollify_n = 100;  // cost mollification level when Mollified
	TimeScheme scheme = TimeScheme::Explicit;
};

struct ValueSurface {
	PdeGrid grid;
	std::vector<double> w;   // (n_time+1) x n_space, row k = time index
	std::vector<double> d1;  // central first differences (one-sided at edges)
	std::vector<double> d2;  // central second differences (zero at edges)
	std::uint64_t ctx_fingerprint = 0;

	double at(int k, int j) const { return w[static_cast<size_t>(k) * grid.n_space + j]; }

	// Bilinear interpolation, clamped to the grid (constant extrapolation).
	double interp_w(double t, double y) const;
	double interp_d1(double t, double y) const;

	double w0_at(double y) const { return interp_w(0.0, y); }
};

struct CflReport {
	double diffusion_ratio = 0.0;  // sigma^2 dt / dy^2
	double advection_ratio = 0.0;  // dt sup|drift - effort| / dy
	double sup_drift = 0.0;
	bool explicit_ok = false;      // diffusion + advection <= 1
	bool imex_ok = false;          // advection <= 1
};

CflReport cfl_certificate(const ModelParams& p, const PdeGrid& g);

// Throws ConfigError when the certificate fails for the selected scheme.
ValueSurface solve(const ModelParams& p, const PdeGrid& g,
                   const SolveOptions& opt = {});

// The optimal feedback read off the surface: z = -w_y(t, log x)/kappa
// (bilinear in (t, y), constant beyond the grid), effort clamp(pi + z).
FeedbackPolicy z_feedback(std::shared_ptr<const ValueSurface> surface,
                          const ModelParams& p);

// Max |−w_t − H| over a stride-coarsened interior subsampling with the same
// stencil logic at the coarse spacing; a grid-consistency diagnostic.
double pde_residual(const ValueSurface& s, const ModelParams& p, HamMode mode,
                    int stride = 4);

// CSV header t,y,w,d1,d2 (row-major by time, optional strides); binary layout
// is two little-endian int64 dimensions (rows = n_time+1, cols = n_space)
// followed by the w table row-major as little-endian IEEE doubles.
void export_surface_csv(std::ostream& os, const ValueSurface& s,
                        int stride_t = 1, int stride_y = 1);
void export_surface_binary(std::ostream& os, const ValueSurface& s);

}  // namespace resreg
