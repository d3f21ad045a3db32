#include "atomslit/constants.hpp"
#include "atomslit/motional.hpp"
#include "atomslit/recoil.hpp"
#include "atomslit/rng.hpp"
#include "atomslit/trap.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

using namespace atomslit;

namespace {

const PhysicalConstants c0 = PhysicalConstants::rb87_d2();

// Independent oracle for the momentum-displacement overlap: expand the
// thermal state over number states and integrate each displaced Hermite
// wavefunction overlap <n| D |n> = integral psi_n(p - d/2) psi_n(p + d/2) dp
// by trapezoid quadrature, then weight with the Boltzmann occupations.
// Shares no formula with the closed-form implementation under test.
double overlap_oracle(double omega, double mass, double nbar, double delta,
                      const PhysicalConstants& c) {
    const double rho = std::sqrt(c.hbar * mass * omega);  // momentum scale
    const double d = delta / rho;

    int n_max = 0;
    if (nbar > 0.0) {
        const double t = nbar / (1.0 + nbar);
        n_max = static_cast<int>(std::ceil(std::log(1e-13) / std::log(t))) + 2;
    }

    const double span = std::sqrt(2.0 * n_max + 1.0) + 0.5 * d + 10.0;
    const int grid = 30001;
    const double h = 2.0 * span / (grid - 1);

    std::vector<double> phi_a(n_max + 1), phi_b(n_max + 1);
    std::vector<double> integral(n_max + 1, 0.0);
    const double norm0 = std::pow(pi, -0.25);
    for (int g = 0; g < grid; ++g) {
        const double u = -span + h * g;
        const double w = (g == 0 || g == grid - 1) ? 0.5 : 1.0;
        for (int side = 0; side < 2; ++side) {
            const double z = side == 0 ? u - 0.5 * d : u + 0.5 * d;
            auto& phi = side == 0 ? phi_a : phi_b;
            phi[0] = norm0 * std::exp(-0.5 * z * z);
            if (n_max >= 1) phi[1] = std::sqrt(2.0) * z * phi[0];
            for (int n = 2; n <= n_max; ++n)
                phi[n] = std::sqrt(2.0 / n) * z * phi[n - 1] -
                         std::sqrt((n - 1.0) / n) * phi[n - 2];
        }
        for (int n = 0; n <= n_max; ++n) integral[n] += w * phi_a[n] * phi_b[n];
    }

    double overlap = 0.0;
    const double t = nbar / (1.0 + nbar);
    double weight = 1.0 / (1.0 + nbar);
    for (int n = 0; n <= n_max; ++n) {
        overlap += weight * integral[n] * h;
        weight *= t;
    }
    return std::fabs(overlap);
}

TrapModel anchored_trap() {
    return TrapModel::from_momentum_anchor(c0, 10.49, 1.60, two_pi * 300e3);
}

double sigma_p_at(double depth_mk, double nbar = 0.0) {
    const double omega = trap_frequencies(anchored_trap(), depth_mk).axial;
    return MotionalState{omega, nbar, c0.mass}.sigma_p(c0);
}

}  // namespace

TEST_SUITE_BEGIN("physics_core");

TEST_CASE("wavenumber, recoil momentum and D2 lifetime") {
    CHECK(c0.photon_wavenumber() == doctest::Approx(8052877.645726879).epsilon(1e-12));
    CHECK(c0.recoil_momentum() == doctest::Approx(8.492337810932878e-28).epsilon(1e-12));
    CHECK(1.0 / c0.gamma_d2 == doctest::Approx(2.6219924726836135e-8).epsilon(1e-12));
    CHECK_THROWS_AS(
        [] {
            PhysicalConstants bad;
            bad.mass = 0.0;
            bad.validate();
        }(),
        std::domain_error);
}

TEST_CASE("momentum anchor fixes the axial frequency near 38.6 kHz") {
    const TrapModel trap = anchored_trap();
    CHECK(trap.anchor_omega_axial == doctest::Approx(242623.9446).epsilon(5e-7));
    CHECK(trap.anchor_omega_axial / (two_pi * 1e3) ==
          doctest::Approx(38.6148).epsilon(2e-5));
    // Round trip: the anchored trap's ground state must reproduce the anchor.
    CHECK(sigma_p_at(10.49) / c0.recoil_momentum() ==
          doctest::Approx(1.60).epsilon(1e-12));
    // At the anchor, E_recoil / (hbar omega) = 1/(4 * 1.6^2) exactly.
    CHECK(c0.recoil_energy() / (c0.hbar * trap.anchor_omega_axial) ==
          doctest::Approx(0.09765625).epsilon(1e-12));
}

TEST_CASE("fourth-root law: momentum spread scales as depth^(1/4)") {
    const double base = sigma_p_at(0.75);
    CHECK(sigma_p_at(12.0) / base == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(sigma_p_at(0.60) / c0.recoil_momentum() ==
          doctest::Approx(0.7824632032314911).epsilon(1e-12));
    CHECK(sigma_p_at(0.60) / c0.recoil_momentum() > 0.77);
    CHECK(sigma_p_at(0.60) / c0.recoil_momentum() < 0.79);
    CHECK_THROWS_AS(trap_frequencies(anchored_trap(), -1.0), std::domain_error);
}

TEST_CASE("recoil ratio at the published endpoints") {
    CHECK(recoil_eta(c0, sigma_p_at(10.49)) == doctest::Approx(0.3125).epsilon(1e-12));
    CHECK(recoil_eta(c0, sigma_p_at(0.60)) ==
          doctest::Approx(0.6390076848790491).epsilon(1e-12));
    CHECK(recoil_eta(c0, sigma_p_at(10.49), 0.5) ==
          doctest::Approx(0.15625).epsilon(1e-12));
    CHECK_THROWS_AS(recoil_eta(c0, 0.0), std::domain_error);
    CHECK_THROWS_AS(recoil_eta(c0, 1.0, 1.5), std::domain_error);
}

TEST_CASE("visibility endpoints and monotonicity") {
    const double v_deep = visibility(recoil_eta(c0, sigma_p_at(10.49)));
    const double v_shallow = visibility(recoil_eta(c0, sigma_p_at(0.60)));
    CHECK(v_deep == doctest::Approx(0.8225775623986645).epsilon(1e-12));
    CHECK(v_shallow == doctest::Approx(0.44190442970578786).epsilon(1e-12));
    CHECK(visibility(0.0) == 1.0);
    double prev = 1.0;
    for (double eta = 0.05; eta < 2.0; eta += 0.05) {
        const double v = visibility(eta);
        CHECK(v < prev);
        CHECK(v > 0.0);
        prev = v;
    }
}

TEST_CASE("thermal scaling of the recoil ratio") {
    CHECK(recoil_eta_eff(0.3125, 0.37) ==
          doctest::Approx(0.4122158111960287).epsilon(1e-12));
    CHECK(recoil_eta_eff(0.25, 1.5) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(recoil_eta_eff(0.25, 0.0) == doctest::Approx(0.25).epsilon(1e-12));
    // Identity behind the visibility budget: e^{-2 eta^2 (2 nbar + 1)}.
    for (const double nbar : {0.0, 0.08, 0.37, 1.0, 3.0}) {
        const double lhs = visibility(recoil_eta_eff(0.3125, nbar));
        const double rhs = std::pow(visibility(0.3125), 2.0 * nbar + 1.0);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("uncertainty product floor") {
    for (const double nbar : {0.0, 0.5, 3.0}) {
        MotionalState s{two_pi * 38.7e3, nbar, c0.mass};
        const double product = s.sigma_x(c0) * s.sigma_p(c0);
        CHECK(product >= 0.5 * c0.hbar * (1.0 - 1e-12));
        CHECK(product == doctest::Approx(0.5 * c0.hbar * (2.0 * nbar + 1.0)).epsilon(1e-12));
    }
    MotionalState bad{0.0, 0.0, c0.mass};
    CHECK_THROWS_AS(bad.sigma_x(c0), std::domain_error);
}

TEST_CASE("momentum overlap against the Hermite-expansion oracle") {
    RandomStream rng(20260819, 0);
    const double hbar_k = c0.recoil_momentum();
    for (int trial = 0; trial < 20; ++trial) {
        const double omega = two_pi * rng.uniform(10e3, 500e3);
        const double nbar = rng.uniform(0.0, 2.0);
        const double delta = rng.uniform(0.1, 3.0) * hbar_k;
        MotionalState state{omega, nbar, c0.mass};
        const double closed = std::abs(momentum_overlap(c0, state, delta));
        const double oracle = overlap_oracle(omega, c0.mass, nbar, delta, c0);
        CAPTURE(omega);
        CAPTURE(nbar);
        CAPTURE(delta / hbar_k);
        CHECK(std::fabs(closed - oracle) < 1e-6);
    }
}

TEST_CASE("overlap at the full recoil separation equals the visibility law") {
    const double omega = two_pi * 38.7e3;
    const double hbar_k = c0.recoil_momentum();
    {
        MotionalState s{omega, 0.0, c0.mass};
        const double ov = std::abs(momentum_overlap(c0, s, 2.0 * hbar_k));
        CHECK(ov == doctest::Approx(0.8229313384363987).epsilon(1e-12));
        const double eta = recoil_eta(c0, s.sigma_p(c0));
        CHECK(eta * eta == doctest::Approx(0.09744125508687289).epsilon(1e-12));
        CHECK(ov == doctest::Approx(visibility(eta)).epsilon(1e-12));
    }
    {
        MotionalState s{omega, 0.37, c0.mass};
        const double ov = std::abs(momentum_overlap(c0, s, 2.0 * hbar_k));
        CHECK(ov == doctest::Approx(0.7124143620321043).epsilon(1e-12));
    }
}

TEST_CASE("recoil state bundles the derived quantities") {
    MotionalState s{trap_frequencies(anchored_trap(), 10.49).axial, 0.08, c0.mass};
    const RecoilState r = RecoilState::make(c0, s, 1.0, 0.25);
    CHECK(r.photon_momentum == doctest::Approx(c0.recoil_momentum()).epsilon(1e-15));
    CHECK(r.eta == doctest::Approx(0.3125).epsilon(1e-12));
    CHECK(r.eta_eff == doctest::Approx(0.3125 * std::sqrt(1.16)).epsilon(1e-12));
    CHECK(r.phi == 0.25);
}

TEST_SUITE_END();
