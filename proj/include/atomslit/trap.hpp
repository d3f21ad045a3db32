#pragma once

#include <cmath>
#include <stdexcept>

#include "atomslit/constants.hpp"

namespace atomslit {

struct TrapFrequencies {
    double axial;   // rad/s
    double radial;  // rad/s
};

// Optical tweezer in the harmonic approximation. Trap frequencies scale as
// sqrt(U) with the depth U, so the whole model is pinned by one calibration
// anchor: the measured depth/frequency pair (anchor_depth_mk,
// anchor_omega_*). Depths are quoted as U/kB in millikelvin.
struct TrapModel {
    double depth_mk = 10.49;           // current operating depth
    double anchor_depth_mk = 10.49;
    double anchor_omega_axial;         // rad/s at anchor depth
    double anchor_omega_radial;        // rad/s at anchor depth

    void validate() const {
        if (!(depth_mk > 0.0) || !(anchor_depth_mk > 0.0) ||
            !(anchor_omega_axial > 0.0) || !(anchor_omega_radial > 0.0)) {
            throw std::domain_error("TrapModel: depths and anchor frequencies must be > 0");
        }
    }

    // Anchor chosen so the ground-state momentum spread at anchor_depth_mk
    // equals dp_hbark recoil momenta: omega = 2 dp^2 / (hbar m).
    static TrapModel from_momentum_anchor(const PhysicalConstants& c,
                                          double anchor_depth_mk,
                                          double dp_hbark,
                                          double omega_radial) {
        if (!(dp_hbark > 0.0)) {
            throw std::domain_error("TrapModel: momentum anchor must be > 0");
        }
        const double dp = dp_hbark * c.recoil_momentum();
        TrapModel m;
        m.depth_mk = anchor_depth_mk;
        m.anchor_depth_mk = anchor_depth_mk;
        m.anchor_omega_axial = 2.0 * dp * dp / (c.hbar * c.mass);
        m.anchor_omega_radial = omega_radial;
        m.validate();
        return m;
    }
};

// Harmonic scaling omega proportional to sqrt(depth), per axis.
inline TrapFrequencies trap_frequencies(const TrapModel& model, double depth_mk) {
    model.validate();
    if (!(depth_mk > 0.0)) {
        throw std::domain_error("trap_frequencies: depth must be > 0");
    }
    const double scale = std::sqrt(depth_mk / model.anchor_depth_mk);
    return {model.anchor_omega_axial * scale, model.anchor_omega_radial * scale};
}

}  // namespace atomslit
