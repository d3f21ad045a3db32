#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "atomslit/constants.hpp"
#include "atomslit/ensemble.hpp"
#include "atomslit/motional.hpp"
#include "atomslit/trap.hpp"

namespace atomslit {

enum class EmissionPattern { isotropic, dipole, axial_only };

EmissionPattern emission_pattern_from_string(const std::string& name);
std::string to_string(EmissionPattern pattern);

// Continuous photon scattering on the closed cycling transition. Events occur
// at exponential waiting times with mean 1/rate. Each event is an absorption
// kick of +hbar k * absorption_projection along the axis, an excited interval
// of mean excited_lifetime during which the trap curvature is multiplied by
// antitrap_factor (negative = anti-trapped, the default), and an emission
// kick of magnitude hbar k whose axial component follows emission_pattern.
// saturation is carried for bookkeeping only; the event rate is always the
// independent `rate` input.
struct ScatteringParams {
    double rate = 6.7e6;                  // events/s
    double saturation = 0.05;             // dimensionless, recorded only
    double excited_lifetime = 2.622e-8;   // s, 1/Gamma_D2
    double antitrap_factor = -1.0;        // curvature multiplier while excited
    EmissionPattern emission_pattern = EmissionPattern::dipole;
    double absorption_projection = 1.0;   // axial share of the absorption kick

    void validate() const;
};

struct VisibilitySeries {
    std::vector<double> bin_edges;   // s, size bins + 1
    std::vector<double> visibility;  // per bin
    std::vector<double> stderror;    // per bin
    std::vector<double> nbar;        // per bin
};

// Evolve every sample independently for `duration`: exact harmonic rotation
// at the trap's axial frequency between scattering events, event kicks and
// anti-trapped excited intervals as above. Event-driven, so the rate = 0 path
// is a single exact rotation with no integrator error. Trajectory j draws
// from stream (seed, j).
Ensemble evolve(const PhysicalConstants& c, const Ensemble& ensemble,
                double duration, const TrapModel& trap,
                const ScatteringParams& scat, std::uint64_t seed,
                int workers = 0);

// Time-binned visibility decay under continuous scattering. The ensemble is
// propagated to each bin center, where the static estimator applies to the
// photon collected in that bin; visibility, jackknife error and instantaneous
// nbar are recorded per bin. Requires bin_width to divide total_time and
// n >= 1000.
VisibilitySeries time_binned_visibility(const PhysicalConstants& c,
                                        const MotionalState& state,
                                        const TrapModel& trap,
                                        const ScatteringParams& scat,
                                        double total_time, double bin_width,
                                        std::size_t n, std::uint64_t seed,
                                        int workers = 0);

// Ensembles at each bin center of the same schedule, for Wigner export.
std::vector<Ensemble> bin_center_ensembles(const PhysicalConstants& c,
                                           const MotionalState& state,
                                           const TrapModel& trap,
                                           const ScatteringParams& scat,
                                           double total_time, double bin_width,
                                           std::size_t n, std::uint64_t seed,
                                           int workers = 0);

}  // namespace atomslit
