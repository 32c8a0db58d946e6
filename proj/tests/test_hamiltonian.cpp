#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "resreg/hamiltonian.hpp"

using namespace resreg;

namespace {

HamiltonianContext paper_ctx() { return HamiltonianContext::make(ModelParams{}); }

}  // namespace

TEST_SUITE("hamiltonian") {

TEST_CASE("clamped branches at the default parameter point") {
	const auto c = paper_ctx();
	// pi == P == 1 for the inverse price, so y is irrelevant here.
	// K1 = (d1 - pi - m/2) m - (sigma^2 gamma/2)(m + pi)^2 = -60.0605 + 10 d1
	CHECK(k1(c, 0.3, 0.0) == doctest::Approx(-60.0605).epsilon(1e-12));
	CHECK(k1(c, -2.0, 2.0) == doctest::Approx(-40.0605).epsilon(1e-12));
	// K2 = (-d1 + pi - m/2) m - (sigma^2 gamma/2)(m - pi)^2 = -40.0405 - 10 d1
	CHECK(k2(c, 0.3, 0.0) == doctest::Approx(-40.0405).epsilon(1e-12));
	CHECK(k2(c, 1.4, -1.0) == doctest::Approx(-30.0405).epsilon(1e-12));
}

TEST_CASE("interior quadratic and its tangent pieces") {
	const auto c = paper_ctx();
	// at d1 = 0: kappa/2 - sigma^2 gamma/2 = 0.5005 - 0.0005
	CHECK(q_exact(c, 1.0, 0.0) == doctest::Approx(0.5).epsilon(1e-13));

	// continuity at both switches s = -m_lower and s = m_upper
	const double d_lo = (1.0 + c.m_lower) * c.kappa;  // s = -m_lower
	const double d_up = (1.0 - c.m_upper) * c.kappa;  // s = m_upper
	CHECK(q_exact(c, 1.0, d_lo * (1.0 - 1e-10)) ==
	      doctest::Approx(q_exact(c, 1.0, d_lo * (1.0 + 1e-10))).epsilon(1e-8));
	CHECK(q_exact(c, 1.0, d_up - 1e-9) ==
	      doctest::Approx(q_exact(c, 1.0, d_up + 1e-9)).epsilon(1e-8));
}

TEST_CASE("second-derivative slot is exactly linear; drift slot cancels") {
	const auto c = paper_ctx();
	for (double d2 : {-4.0, 0.5, 9.0}) {
		const double lin = hamiltonian_exact(c, 0.7, 2.0, d2) -
		                   hamiltonian_exact(c, 0.7, 2.0, 0.0);
		CHECK(lin == doctest::Approx(0.5 * c.sigma * c.sigma * d2).epsilon(1e-10));
		const double line = hamiltonian_eps(c, 0.7, 2.0, d2) -
		                    hamiltonian_eps(c, 0.7, 2.0, 0.0);
		CHECK(line == doctest::Approx(0.5 * c.sigma * c.sigma * d2).epsilon(1e-10));
	}

	// at mu(e^y) = lambda - sigma^2/2 the first-derivative slot drops out
	const double ystar = std::log(c.lambda - 0.5 * c.sigma * c.sigma);
	CHECK(c.drift_log(ystar) == doctest::Approx(0.0).epsilon(1e-14));
	const double bare =
	    std::max({k1(c, ystar, 3.0), k2(c, ystar, 3.0), q_exact(c, 1.0, 3.0)});
	CHECK(hamiltonian_exact(c, ystar, 3.0, 0.0) ==
	      doctest::Approx(bare).epsilon(1e-13));
}

TEST_CASE("exact Hamiltonian matches the z-grid oracle") {
	const auto c = paper_ctx();
	std::mt19937_64 rng(42);
	std::uniform_real_distribution<double> uy(-3.0, 3.0), ud1(-15.0, 15.0),
	    ud2(-5.0, 5.0);
	double worst = 0.0;
	for (int i = 0; i < 200; ++i) {
		const double y = uy(rng), d1 = ud1(rng), d2 = ud2(rng);
		const double ref = brute_force_hamiltonian(c, y, d1, d2);
		const double gap = std::abs(hamiltonian_exact(c, y, d1, d2) - ref);
		const double tol = 1e-4 * z_lipschitz_bound(c, d1) + 1e-9;
		CHECK(gap <= tol);
		worst = std::max(worst, gap);
	}
	CHECK(worst <= 1e-4 * z_lipschitz_bound(c, 15.0) + 1e-9);
}

TEST_CASE("curvature constant: 1 + gamma sigma^2, not 1 + gamma^2 sigma") {
	// the two coincide when gamma == sigma, so adjudicate away from that line
	ModelParams p;
	p.gamma = 0.5;
	p.sigma = 0.2;
	const auto c = HamiltonianContext::make(p);
	const double kappa_wrong = 1.0 + p.gamma * p.gamma * p.sigma;
	REQUIRE(c.kappa == doctest::Approx(1.0 + p.gamma * p.sigma * p.sigma));

	auto q_wrong = [&](double pi, double d1) {
		const double s = pi - d1 / kappa_wrong;
		const double sg = 0.5 * p.sigma * p.sigma * p.gamma;
		if (s < -c.m_lower)
			return -0.5 * kappa_wrong * c.m_lower * c.m_lower -
			       (pi * kappa_wrong - d1) * c.m_lower - sg * pi * pi;
		if (s > c.m_upper)
			return -0.5 * kappa_wrong * c.m_upper * c.m_upper +
			       (pi * kappa_wrong - d1) * c.m_upper - sg * pi * pi;
		const double r = pi * kappa_wrong - d1;
		return 0.5 * r * r / kappa_wrong - sg * pi * pi;
	};

	std::mt19937_64 rng(7);
	std::uniform_real_distribution<double> uy(-2.0, 2.0), ud1(-8.0, 8.0);
	double gap_right = 0.0, gap_wrong = 0.0;
	for (int i = 0; i < 100; ++i) {
		const double y = uy(rng), d1 = ud1(rng);
		const double ref = brute_force_hamiltonian(c, y, d1, 0.0);
		gap_right = std::max(gap_right,
		                     std::abs(hamiltonian_exact(c, y, d1, 0.0) - ref));
		const double pi = c.pi_log(y);
		const double wrong = std::max({k1(c, y, d1), k2(c, y, d1),
		                               q_wrong(pi, d1)}) +
		                     c.drift_log(y) * d1;
		gap_wrong = std::max(gap_wrong, std::abs(wrong - ref));
	}
	CHECK(gap_right <= 2e-3);
	CHECK(gap_wrong > 2e-3);
}

TEST_CASE("blended interior: exact away from the switches, eps/3 near them") {
	const auto c = paper_ctx();
	const double h = c.blend_h;
	REQUIRE(h > 0.0);

	auto d1_of_s = [&](double s) { return (1.0 - s) * c.kappa; };
	// s well inside each region
	for (double s : {-c.m_lower - 2.0 * h, -c.m_lower + 2.0 * h, 0.0,
	                 c.m_upper - 2.0 * h, c.m_upper + 2.0 * h}) {
		const double d1 = d1_of_s(s);
		CHECK(q_eps(c, 1.0, d1) ==
		      doctest::Approx(q_exact(c, 1.0, d1)).epsilon(1e-12));
	}
	// dense sweep across both switch windows
	double worst = 0.0;
	for (int i = 0; i <= 4000; ++i) {
		const double s = -c.m_lower - 2.0 * h +
		                 (2.0 * c.m_lower + 4.0 * h) * i / 4000.0;
		const double d1 = d1_of_s(s);
		worst = std::max(worst, std::abs(q_eps(c, 1.0, d1) - q_exact(c, 1.0, d1)));
	}
	for (int i = 0; i <= 4000; ++i) {
		const double s = c.m_upper - 2.0 * h + 4.0 * h * i / 4000.0;
		const double d1 = d1_of_s(s);
		worst = std::max(worst, std::abs(q_eps(c, 1.0, d1) - q_exact(c, 1.0, d1)));
	}
	CHECK(worst <= c.epsilon / 3.0);
}

TEST_CASE("clipped interior: q_eps core, affine tails beyond Gamma + 1") {
	const auto c = paper_ctx();
	for (double d1 : {-c.Gamma, -2.0, 0.0, 5.0, c.Gamma})
		CHECK(k3_eps(c, 0.4, d1) ==
		      doctest::Approx(q_eps(c, 1.0, d1)).epsilon(1e-12));

	for (double d1 : {c.Gamma + 1.0, c.Gamma + 7.0, 40.0}) {
		const double r = c.kappa - d1;  // pi kappa - d1 at pi = 1
		const double tail = -0.5 * c.kappa * c.m_lower * c.m_lower - r * c.m_lower;
		CHECK(k3_eps(c, 0.4, d1) == doctest::Approx(tail).epsilon(1e-12));
	}
	for (double d1 : {-c.Gamma - 1.0, -c.Gamma - 7.0, -40.0}) {
		const double r = c.kappa - d1;
		const double tail = -0.5 * c.kappa * c.m_upper * c.m_upper + r * c.m_upper;
		CHECK(k3_eps(c, 0.4, d1) == doctest::Approx(tail).epsilon(1e-12));
	}

	// the printed tails drop the sigma^2 gamma pi^2/2 term, nothing more
	const double drop = 0.5 * c.sigma * c.sigma * c.gamma;  // pi = 1
	for (int i = 0; i <= 2000; ++i) {
		const double d1 = -c.Gamma - 2.0 + (2.0 * c.Gamma + 4.0) * i / 2000.0;
		CHECK(std::abs(k3_eps(c, 0.4, d1) - q_eps(c, 1.0, d1)) <= drop + 1e-12);
	}
}

TEST_CASE("sampled |H - H_eps| stays within epsilon") {
	const auto c = paper_ctx();
	std::mt19937_64 rng(2718);
	std::uniform_real_distribution<double> uy(-12.7, 3.0), ud1(-40.0, 40.0);
	double worst = 0.0;
	for (int i = 0; i < 5000; ++i) {
		const double y = uy(rng), d1 = ud1(rng);
		worst = std::max(worst, std::abs(hamiltonian_exact(c, y, d1, 0.0) -
		                                 hamiltonian_eps(c, y, d1, 0.0)));
	}
	CHECK(worst <= c.epsilon);
}

TEST_CASE("candidate effort follows the winning branch") {
	const auto c = paper_ctx();
	for (bool eps : {false, true}) {
		CHECK(candidate_effort(c, 0.0, 0.0, eps) == doctest::Approx(1.0));
		CHECK(candidate_effort(c, 0.0, 300.0, eps) == doctest::Approx(-10.0));
		CHECK(candidate_effort(c, 0.0, -300.0, eps) == doctest::Approx(10.0));
	}
	// mild slope: interior response 1 - d1/kappa
	CHECK(candidate_effort(c, 0.0, 0.5, false) ==
	      doctest::Approx(1.0 - 0.5 / c.kappa).epsilon(1e-12));
}

TEST_CASE("exact Hamiltonian is convex in d1 (max of affine branches)") {
	const auto c = paper_ctx();
	std::mt19937_64 rng(99);
	std::uniform_real_distribution<double> uy(-3.0, 3.0), ud1(-20.0, 20.0);
	for (int i = 0; i < 300; ++i) {
		const double y = uy(rng);
		const double a = ud1(rng), b = ud1(rng);
		const double mid = hamiltonian_exact(c, y, 0.5 * (a + b), 0.0);
		const double avg = 0.5 * (hamiltonian_exact(c, y, a, 0.0) +
		                          hamiltonian_exact(c, y, b, 0.0));
		CHECK(mid <= avg + 1e-9);
	}
}

TEST_CASE("context fingerprint tracks the inputs") {
	ModelParams p;
	const auto a = HamiltonianContext::make(p);
	CHECK(a.fingerprint() == HamiltonianContext::make(p).fingerprint());
	p.epsilon = 0.005;
	CHECK(a.fingerprint() != HamiltonianContext::make(p).fingerprint());
}

}  // TEST_SUITE
