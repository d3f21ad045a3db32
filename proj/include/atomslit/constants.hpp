#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace atomslit {

inline constexpr double pi = std::numbers::pi_v<double>;
inline constexpr double two_pi = 2.0 * pi;

// Physical constants of the scattering problem. Defaults describe a single
// 87Rb atom driven on the D2 cycling transition (CODATA 2018 / Steck's Rb87
// data sheet). All values SI.
struct PhysicalConstants {
    double hbar = 1.054571817e-34;       // J s
    double k_boltzmann = 1.380649e-23;   // J/K
    double mass = 1.44316060e-25;        // kg, m(87Rb)
    double lambda_photon = 780.241e-9;   // m, D2 line
    double gamma_d2 = two_pi * 6.07e6;   // rad/s, D2 natural linewidth

    double photon_wavenumber() const { return two_pi / lambda_photon; }
    double recoil_momentum() const { return hbar * photon_wavenumber(); }
    // (hbar k)^2 / 2m, the single-photon recoil energy
    double recoil_energy() const {
        const double hk = recoil_momentum();
        return hk * hk / (2.0 * mass);
    }

    void validate() const {
        if (!(hbar > 0.0) || !(k_boltzmann > 0.0) || !(mass > 0.0) ||
            !(lambda_photon > 0.0) || !(gamma_d2 > 0.0)) {
            throw std::domain_error("PhysicalConstants: all values must be strictly positive");
        }
    }

    static PhysicalConstants rb87_d2() { return PhysicalConstants{}; }
};

}  // namespace atomslit
