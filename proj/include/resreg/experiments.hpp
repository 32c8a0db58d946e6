#pragma once

////////////////////////////////////////////////////////////////////////////////
// Run harness: config file ingestion, the seven figure exports, sensitivity
// sweeps, a self-check suite, and the command-line front end. Everything is
// data-first: each figure lands as a CSV plus a gnuplot companion script and
// a JSON summary embedding the config fingerprint, so reruns are diffable.
////////////////////////////////////////////////////////////////////////////////

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "resreg/hjb.hpp"
#include "resreg/params.hpp"

namespace resreg {

struct RunConfig {
	ModelParams params;
	int n_space = 2000;
	int n_time = 5000;
	double y_pad = 0.0;
	int n_paths = 1000;
	std::uint64_t seed = 1729;

	// CLI-level solver switches (not config-file keys, but fingerprinted).
	HamMode mode = HamMode::Eps;
	TimeScheme scheme = TimeScheme::Explicit;

	PdeGrid pde_grid() const {
		return PdeGrid::standard(params, n_space, n_time, y_pad);
	}
	SolveOptions solve_options() const {
		SolveOptions o;
		o.mode = mode;
		o.scheme = scheme;
		return o;
	}
};

// Flat key=value text with optional [grid] and [mc] sections; '#' comments.
// Model keys: lambda, sigma, x0, horizon, gamma, m_lower, m_upper,
//   price.variant (inverse|exp_impact), price.P, price.beta1, price.beta2,
//   cost.c, cost.beta, mu.variant (logistic|truncated), mu.n,
//   reservation_mode (computed|formula|explicit), reservation, epsilon.
// [grid]: n_space, n_time, y_pad. [mc]: n_paths, seed.
// Unknown or duplicate keys are errors; the parsed set is validated.
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

// Normalized full listing of every key (fixed order, %.17g numerics); the
// fingerprint is FNV-1a 64 over that text and is embedded in run metadata.
std::string canonical_config(const RunConfig& cfg);
std::uint64_t config_fingerprint(const RunConfig& cfg);

struct SweepSeries {
	double value = 0.0;       // swept parameter value for this series
	std::vector<double> t;    // report times (~201 points)
	std::vector<double> mean_x;
	std::vector<double> se_x;
	double terminal_mean = 0.0;
	double terminal_se = 0.0;
	double min_alpha = 0.0;   // smallest effort seen across all paths
};

struct SweepReport {
	std::string variable;
	std::vector<SweepSeries> series;
	std::uint64_t seed = 0;
	int n_paths = 0;
	std::string grid_desc;
	std::uint64_t fingerprint = 0;
};

// One fresh PDE solve per value; paths are parallel but the reduction order
// is fixed, so the report is independent of the job count.
SweepReport sweep_beta(const RunConfig& cfg, const std::vector<double>& betas,
                       int jobs = 1);
SweepReport sweep_cost(const RunConfig& cfg, const std::vector<double>& costs,
                       int jobs = 1);
// Renewal on (m_lower from the config) vs off (m_lower = 0), shared seed.
SweepReport compare_renewal(const RunConfig& cfg, int jobs = 1);

// Columns: variable,value,t,mean_x,se_x.
void write_sweep_csv(std::ostream& os, const SweepReport& r);

// which in 1..7. Writes the figure's CSV, a .gp companion, and a summary
// JSON into out_dir (created if missing); returns the paths written.
std::vector<std::string> run_figure(int which, const RunConfig& cfg,
                                    const std::string& out_dir, int jobs = 1);

// Fast self-checks against independent oracles; prints one line per check
// to `log` and returns the number of failures.
int run_verify(const RunConfig& cfg, std::ostream& log);

int run_cli(int argc, char** argv);

}  // namespace resreg
