#include "resreg/hjb.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <ostream>

#include "resreg/smoothing.hpp"

namespace resreg {

PdeGrid PdeGrid::standard(const ModelParams& p, int n_space, int n_time,
                          double y_pad) {
	const double T = p.horizon;
	const double spread = 6.0 * p.sigma * std::sqrt(T) + std::abs(p.lambda) * T;
	PdeGrid g;
	g.y_min = std::log(p.x0) - spread - p.m_lower * T - 1.0 - y_pad;
	g.y_max = std::log(p.x0) + spread + 1.0 + y_pad;
	g.n_space = n_space;
	g.n_time = n_time;
	g.horizon = T;
	return g;
}

void validate(const PdeGrid& g, const ModelParams& p) {
	if (!(g.y_min < std::log(p.x0) && std::log(p.x0) < g.y_max))
		throw ConfigError("grid: log(x0) must lie strictly inside [y_min, y_max]");
	if (g.n_space < 3) throw ConfigError("grid: n_space must be >= 3");
	if (g.n_time < 1) throw ConfigError("grid: n_time must be >= 1");
	if (!(g.horizon > 0.0)) throw ConfigError("grid: horizon must be > 0");
}

CflReport cfl_certificate(const ModelParams& p, const PdeGrid& g) {
	CflReport r;
	const HamiltonianContext c = HamiltonianContext::make(p);
	double sup = 0.0;
	for (int j = 0; j < g.n_space; ++j) {
		const double b = c.drift_log(g.y(j));
		sup = std::max(sup, std::abs(b + p.m_lower));  // full renewal
		sup = std::max(sup, std::abs(b - p.m_upper));  // full harvest
	}
	r.sup_drift = sup;
	r.diffusion_ratio = p.sigma * p.sigma * g.dt() / (g.dy() * g.dy());
	r.advection_ratio = g.dt() * sup / g.dy();
	r.explicit_ok = r.diffusion_ratio + r.advection_ratio <= 1.0;
	r.imex_ok = r.advection_ratio <= 1.0;
	return r;
}

namespace {

// Tridiagonal solve of (I - c D2) v = rhs with identity boundary rows
// (interior rows: -c v_{j-1} + (1 + 2c) v_j - c v_{j+1} = rhs_j).
void thomas_identity_boundary(int n, double c, std::vector<double>& rhs,
                              std::vector<double>& cp) {
	cp.assign(n, 0.0);
	for (int j = 1; j < n; ++j) {
		const bool interior = j < n - 1;
		const double sub = interior ? -c : 0.0;
		const double diag = interior ? 1.0 + 2.0 * c : 1.0;
		const double sup = interior ? -c : 0.0;
		const double m = diag - sub * cp[j - 1];
		cp[j] = sup / m;
		rhs[j] = (rhs[j] - sub * rhs[j - 1]) / m;
	}
	for (int j = n - 2; j >= 0; --j) rhs[j] -= cp[j] * rhs[j + 1];
}

}  // namespace

ValueSurface solve(const ModelParams& p, const PdeGrid& g,
                   const SolveOptions& opt) {
	validate(p);
	validate(g, p);
	const CflReport cfl = cfl_certificate(p, g);
	if (opt.scheme == TimeScheme::Explicit && !cfl.explicit_ok)
		throw ConfigError(
		    "CFL certificate failed for the explicit scheme (diffusion " +
		    std::to_string(cfl.diffusion_ratio) + " + advection " +
		    std::to_string(cfl.advection_ratio) +
		    " > 1); refine the time grid or use the IMEX scheme");
	if (opt.scheme == TimeScheme::Imex && !cfl.imex_ok)
		throw ConfigError("CFL certificate failed (advection ratio > 1)");

	const HamiltonianContext ctx = HamiltonianContext::make(p);
	const bool eps_mode = opt.mode == HamMode::Eps;
	const int ns = g.n_space, nt = g.n_time;
	const double dy = g.dy(), dt = g.dt();
	const double half_sig2 = 0.5 * p.sigma * p.sigma;

	ValueSurface s;
	s.grid = g;
	s.ctx_fingerprint = ctx.fingerprint();
	s.w.assign(static_cast<size_t>(nt + 1) * ns, 0.0);

	// per-node constants
	std::vector<double> pi(ns), drift0(ns);
	for (int j = 0; j < ns; ++j) {
		pi[j] = ctx.pi_log(g.y(j));
		drift0[j] = ctx.drift_log(g.y(j));
	}

	// terminal data
	{
		double* row = &s.w[static_cast<size_t>(nt) * ns];
		if (opt.cost_mode == CostMode::Raw) {
			for (int j = 0; j < ns; ++j) row[j] = -p.cost(std::exp(g.y(j)));
		} else {
			const smoothing::MollifiedCost fn =
			    smoothing::mollify_cost(p.cost, opt.mollify_n);
			for (int j = 0; j < ns; ++j) row[j] = -fn(std::exp(g.y(j)));
		}
	}

	auto ham = [&](int j, double d1v, double d2v) {
		const double y = g.y(j);
		return (eps_mode ? hamiltonian_eps(ctx, y, d1v, d2v)
		                 : hamiltonian_exact(ctx, y, d1v, d2v));
	};

	std::vector<double> rhs(ns), scratch(ns);
	const double imex_c = dt * half_sig2 / (dy * dy);

	for (int k = nt - 1; k >= 0; --k) {
		const double* up = &s.w[static_cast<size_t>(k + 1) * ns];
		double* row = &s.w[static_cast<size_t>(k) * ns];
		for (int j = 0; j < ns; ++j) {
			// central (one-sided at edges) candidates to pick the branch
			double d1c, d2c;
			if (j == 0) {
				d1c = (up[1] - up[0]) / dy;
				d2c = 0.0;
			} else if (j == ns - 1) {
				d1c = (up[ns - 1] - up[ns - 2]) / dy;
				d2c = 0.0;
			} else {
				d1c = (up[j + 1] - up[j - 1]) / (2.0 * dy);
				d2c = (up[j + 1] - 2.0 * up[j] + up[j - 1]) / (dy * dy);
			}
			const double a = candidate_effort(ctx, g.y(j), d1c, eps_mode);
			const double beff = drift0[j] - a;
			double d1u;
			if (j == 0)
				d1u = (up[1] - up[0]) / dy;
			else if (j == ns - 1)
				d1u = (up[ns - 1] - up[ns - 2]) / dy;
			else
				d1u = beff >= 0.0 ? (up[j + 1] - up[j]) / dy
				                  : (up[j] - up[j - 1]) / dy;
			const double H = ham(j, d1u, d2c);
			if (opt.scheme == TimeScheme::Explicit) {
				row[j] = up[j] + dt * H;
			} else {
				// move diffusion to the implicit side
				rhs[j] = up[j] + dt * (H - half_sig2 * d2c);
			}
		}
		if (opt.scheme == TimeScheme::Imex) {
			thomas_identity_boundary(ns, imex_c, rhs, scratch);
			std::copy(rhs.begin(), rhs.end(), row);
		}
	}

	// derivative tables with the exporting stencils
	s.d1.assign(s.w.size(), 0.0);
	s.d2.assign(s.w.size(), 0.0);
	for (int k = 0; k <= nt; ++k) {
		const double* row = &s.w[static_cast<size_t>(k) * ns];
		double* r1 = &s.d1[static_cast<size_t>(k) * ns];
		double* r2 = &s.d2[static_cast<size_t>(k) * ns];
		r1[0] = (row[1] - row[0]) / dy;
		r1[ns - 1] = (row[ns - 1] - row[ns - 2]) / dy;
		for (int j = 1; j < ns - 1; ++j) {
			r1[j] = (row[j + 1] - row[j - 1]) / (2.0 * dy);
			r2[j] = (row[j + 1] - 2.0 * row[j] + row[j - 1]) / (dy * dy);
		}
	}
	return s;
}

namespace {

double bilinear(const std::vector<double>& tab, const PdeGrid& g, double t,
                double y) {
	const int ns = g.n_space;
	double kf = t / g.dt();
	double jf = (y - g.y_min) / g.dy();
	kf = std::clamp(kf, 0.0, static_cast<double>(g.n_time));
	jf = std::clamp(jf, 0.0, static_cast<double>(ns - 1));
	const int k = std::min(static_cast<int>(kf), g.n_time - 1);
	const int j = std::min(static_cast<int>(jf), ns - 2);
	const double ft = kf - k, fy = jf - j;
	const double* r0 = &tab[static_cast<size_t>(k) * ns];
	const double* r1 = r0 + ns;
	return (1.0 - ft) * ((1.0 - fy) * r0[j] + fy * r0[j + 1]) +
	       ft * ((1.0 - fy) * r1[j] + fy * r1[j + 1]);
}

}  // namespace

double ValueSurface::interp_w(double t, double y) const {
	return bilinear(w, grid, t, y);
}

double ValueSurface::interp_d1(double t, double y) const {
	return bilinear(d1, grid, t, y);
}

FeedbackPolicy z_feedback(std::shared_ptr<const ValueSurface> surface,
                          const ModelParams& p) {
	const double kappa = p.kappa();
	auto surf = surface;
	return FeedbackPolicy(
	    [surf, kappa](double t, double log_x) {
		    return -surf->interp_d1(t, log_x) / kappa;
	    },
	    p.price, p.bounds(), surface);
}

double pde_residual(const ValueSurface& s, const ModelParams& p, HamMode mode,
                    int stride) {
	const HamiltonianContext ctx = HamiltonianContext::make(p);
	const bool eps_mode = mode == HamMode::Eps;
	const PdeGrid& g = s.grid;
	const int ns = g.n_space;
	const double DY = g.dy() * stride, DT = g.dt() * stride;
	double worst = 0.0;
	for (int k = 0; k + stride <= g.n_time; k += stride) {
		const double* lo = &s.w[static_cast<size_t>(k) * ns];
		const double* hi = &s.w[static_cast<size_t>(k + stride) * ns];
		for (int j = stride; j + stride < ns; j += stride) {
			const double d1c = (hi[j + stride] - hi[j - stride]) / (2.0 * DY);
			const double d2c =
			    (hi[j + stride] - 2.0 * hi[j] + hi[j - stride]) / (DY * DY);
			const double a = candidate_effort(ctx, g.y(j), d1c, eps_mode);
			const double beff = ctx.drift_log(g.y(j)) - a;
			const double d1u = beff >= 0.0
			                       ? (hi[j + stride] - hi[j]) / DY
			                       : (hi[j] - hi[j - stride]) / DY;
			const double H = eps_mode ? hamiltonian_eps(ctx, g.y(j), d1u, d2c)
			                          : hamiltonian_exact(ctx, g.y(j), d1u, d2c);
			const double res = -(hi[j] - lo[j]) / DT - H;
			worst = std::max(worst, std::abs(res));
		}
	}
	return worst;
}

void export_surface_csv(std::ostream& os, const ValueSurface& s, int stride_t,
                        int stride_y) {
	os << "t,y,w,d1,d2\n";
	char buf[160];
	const int ns = s.grid.n_space;
	for (int k = 0; k <= s.grid.n_time; k += stride_t) {
		for (int j = 0; j < ns; j += stride_y) {
			const size_t idx = static_cast<size_t>(k) * ns + j;
			std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%.12g,%.12g\n",
			              s.grid.t(k), s.grid.y(j), s.w[idx], s.d1[idx],
			              s.d2[idx]);
			os << buf;
		}
	}
}

void export_surface_binary(std::ostream& os, const ValueSurface& s) {
	const std::int64_t dims[2] = {s.grid.n_time + 1, s.grid.n_space};
	os.write(reinterpret_cast<const char*>(dims), sizeof(dims));
	os.write(reinterpret_cast<const char*>(s.w.data()),
	         static_cast<std::streamsize>(s.w.size() * sizeof(double)));
}

}  // namespace resreg
