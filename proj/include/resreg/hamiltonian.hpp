#pragma once

////////////////////////////////////////////////////////////////////////////////
// The regulator's HJB Hamiltonian in log coordinates and its certified
// eps-regularization.
//
// Inner objective over the contract sensitivity z (effort a = clamp(pi+z)):
//   F(z) = pi a - a^2/2 - sigma^2 gamma z^2/2 - a d1,
// whose sup splits into three closed branches:
//   K1 (effort clamped at -m_lower), K2 (clamped at m_upper),
//   K3 = Q (interior), switching on s = pi - d1/kappa, kappa = 1+gamma sigma^2.
// The kappa factor is pinned down numerically by the brute-force oracle (see
// tests); with gamma = sigma it is indistinguishable from 1 + gamma^2 sigma,
// so the adjudicating test runs at gamma != sigma.
//
// Full Hamiltonian:
//   H(y, d1, d2) = max{K1, K2, K3} + (lambda - sigma^2/2 - mu(e^y)) d1
//                + sigma^2 d2 / 2.
// The eps version replaces K3 by a Theta-blended Q_eps clipped to affine
// tails beyond |d1| = Gamma, and max by the smooth ternary max; the sampled
// sup-gap |H - H_eps| <= eps is an acceptance criterion.
////////////////////////////////////////////////////////////////////////////////

#include <cstdint>

#include "resreg/params.hpp"

namespace resreg {

struct HamiltonianContext {
	double lambda = 0.0;
	double sigma = 0.0;
	double gamma = 0.0;
	double kappa = 0.0;
	double m_lower = 0.0;
	double m_upper = 0.0;
	double epsilon = 0.0;
	double Gamma = 0.0;    // clip radius max(m_upper, pi_sup + m_lower) * kappa
	double blend_h = 0.0;  // certified Q_eps switching half-width
	PriceSpec price;
	MuSpec mu;

	double pi_log(double y) const { return price.pi_of_log(y); }
	// drift coefficient on d1 before the effort tilt
	double drift_log(double y) const;

	std::uint64_t fingerprint() const;

	// Builds the context and certifies blend_h: starting from
	// eps/(6 kappa (m_upper + m_lower + 1)), the half-width is halved until
	// the sampled sup |Q_eps - Q| over [0, pi_sup] x [-Gamma-1, Gamma+1]
	// (including switch-local refinements) is <= eps/3.
	static HamiltonianContext make(const ModelParams& p);
};

// Branch values at (y, d1); pi-parameterized variants for the Q family.
double k1(const HamiltonianContext& c, double y, double d1);
double k2(const HamiltonianContext& c, double y, double d1);
double q_exact(const HamiltonianContext& c, double pi, double d1);
double q_eps(const HamiltonianContext& c, double pi, double d1);
double k3_eps(const HamiltonianContext& c, double y, double d1);

double hamiltonian_exact(const HamiltonianContext& c, double y, double d1,
                         double d2);
double hamiltonian_eps(const HamiltonianContext& c, double y, double d1,
                       double d2);

// Effort at the maximizing branch (candidate for upwind direction selection).
double candidate_effort(const HamiltonianContext& c, double y, double d1,
                        bool eps_mode);

// Independent transcription of sup_z F(z) on a z grid: coarse pass over
// each clamp region (F is concave per region), then a fine pass around each
// regional argmax. The adjudicating oracle for all branch formulas.
struct ZGridSpec {
	double coarse_step = 1e-2;
	double fine_step = 1e-4;
};

double brute_force_hamiltonian(const HamiltonianContext& c, double y, double d1,
                               double d2, const ZGridSpec& zg = {});

// Half-width of the oracle z grid (covers every possible maximizer).
double z_half_width(const HamiltonianContext& c);

// sup |dF/dz| over the oracle grid for the given d1; the oracle gap
// tolerance is fine_step times this.
double z_lipschitz_bound(const HamiltonianContext& c, double d1);

}  // namespace resreg
