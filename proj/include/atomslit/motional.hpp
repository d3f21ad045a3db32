#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include "atomslit/constants.hpp"

namespace atomslit {

// Gaussian (thermal) harmonic-oscillator state of the trapped atom. A thermal
// occupation nbar widens both quadratures by the factor (2 nbar + 1), so
// sigma_x * sigma_p = (hbar/2)(2 nbar + 1), with equality to hbar/2 only in
// the ground state.
struct MotionalState {
    double omega;      // rad/s
    double nbar = 0.0; // mean phonon number
    double mass;       // kg

    void validate() const {
        if (!(omega > 0.0)) throw std::domain_error("MotionalState: omega must be > 0");
        if (!(nbar >= 0.0)) throw std::domain_error("MotionalState: nbar must be >= 0");
        if (!(mass > 0.0)) throw std::domain_error("MotionalState: mass must be > 0");
    }

    double sigma_x(const PhysicalConstants& c) const {
        validate();
        return std::sqrt(c.hbar * (2.0 * nbar + 1.0) / (2.0 * mass * omega));
    }
    double sigma_p(const PhysicalConstants& c) const {
        validate();
        return std::sqrt(c.hbar * mass * omega * (2.0 * nbar + 1.0) / 2.0);
    }
};

// (sigma_x, sigma_p) of a thermal oscillator state.
inline std::pair<double, double> ground_state_sigmas(const PhysicalConstants& c,
                                                     double omega, double mass,
                                                     double nbar = 0.0) {
    MotionalState s{omega, nbar, mass};
    return {s.sigma_x(c), s.sigma_p(c)};
}

}  // namespace atomslit
