#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

#include "atomslit/constants.hpp"
#include "atomslit/motional.hpp"

namespace atomslit {

// Recoil ratio eta = (projected photon momentum) / (2 sigma_p). The photon
// kick displaces the atom's momentum wavefunction by +-hbar k along the
// interferometer axis; eta measures that displacement against the state's own
// momentum spread and so controls which-path distinguishability.
inline double recoil_eta(const PhysicalConstants& c, double sigma_p,
                         double axial_projection = 1.0) {
    if (!(sigma_p > 0.0)) throw std::domain_error("recoil_eta: sigma_p must be > 0");
    if (!(axial_projection > 0.0) || axial_projection > 1.0) {
        throw std::domain_error("recoil_eta: axial projection must be in (0, 1]");
    }
    return axial_projection * c.recoil_momentum() / (2.0 * sigma_p);
}

// Thermal correction: a state at occupation nbar behaves like a ground state
// with eta scaled by sqrt(2 nbar + 1).
inline double recoil_eta_eff(double eta, double nbar) {
    if (!(eta > 0.0)) throw std::domain_error("recoil_eta_eff: eta must be > 0");
    if (!(nbar >= 0.0)) throw std::domain_error("recoil_eta_eff: nbar must be >= 0");
    return eta * std::sqrt(2.0 * nbar + 1.0);
}

// Fringe visibility V = exp(-2 eta_eff^2), the overlap of the two
// recoil-displaced momentum wavefunctions.
inline double visibility(double eta_eff) {
    if (!(eta_eff >= 0.0)) throw std::domain_error("visibility: eta_eff must be >= 0");
    return std::exp(-2.0 * eta_eff * eta_eff);
}

// Overlap amplitude between the state displaced by -delta/2 and +delta/2 in
// momentum; equivalently the expectation of the momentum-displacement
// operator. For a centered Gaussian state the amplitude is real:
//   |<D(delta)>| = exp(-delta^2 sigma_x^2 / (2 hbar^2)),
// where sigma_x^2 carries the thermal factor (2 nbar + 1). At delta = 2 hbar k
// and nbar = 0 this reduces to exp(-2 eta^2).
inline std::complex<double> momentum_overlap(const PhysicalConstants& c,
                                             const MotionalState& state,
                                             double delta) {
    state.validate();
    if (!std::isfinite(delta)) throw std::domain_error("momentum_overlap: delta must be finite");
    const double sx = state.sigma_x(c);
    const double arg = delta * sx / c.hbar;
    return {std::exp(-0.5 * arg * arg), 0.0};
}

// Data model of the two-path photon-atom recoil state: the scattered photon
// carries +-photon_momentum along the axis, the atom the opposite kick, and
// phi is the interferometer phase between the two deflected paths.
struct RecoilState {
    double photon_momentum;   // kg m/s, magnitude of the per-path kick
    double axial_projection;  // in (0, 1], share of hbar k along the axis
    double eta;
    double eta_eff;
    double phi = 0.0;         // rad

    static RecoilState make(const PhysicalConstants& c, const MotionalState& state,
                            double axial_projection = 1.0, double phi = 0.0) {
        // eta is defined against the ground-state spread; the thermal factor
        // sqrt(2 nbar + 1) enters once, through eta_eff.
        MotionalState ground = state;
        ground.nbar = 0.0;
        RecoilState r;
        r.photon_momentum = c.recoil_momentum();
        r.axial_projection = axial_projection;
        r.eta = recoil_eta(c, ground.sigma_p(c), axial_projection);
        r.eta_eff = recoil_eta_eff(r.eta, state.nbar);
        r.phi = phi;
        return r;
    }
};

}  // namespace atomslit
