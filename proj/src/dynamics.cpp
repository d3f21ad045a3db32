#include "atomslit/dynamics.hpp"

#include <cmath>
#include <stdexcept>

#include "atomslit/rng.hpp"
#include "parallel.hpp"

namespace atomslit {

EmissionPattern emission_pattern_from_string(const std::string& name) {
    if (name == "isotropic") return EmissionPattern::isotropic;
    if (name == "dipole") return EmissionPattern::dipole;
    if (name == "axial_only") return EmissionPattern::axial_only;
    throw std::domain_error("unknown emission pattern: " + name);
}

std::string to_string(EmissionPattern pattern) {
    switch (pattern) {
        case EmissionPattern::isotropic: return "isotropic";
        case EmissionPattern::dipole: return "dipole";
        case EmissionPattern::axial_only: return "axial_only";
    }
    return "dipole";
}

void ScatteringParams::validate() const {
    if (!(rate >= 0.0) || !std::isfinite(rate)) {
        throw std::domain_error("ScatteringParams: rate must be finite and >= 0");
    }
    if (!(excited_lifetime > 0.0) || !std::isfinite(excited_lifetime)) {
        throw std::domain_error("ScatteringParams: excited_lifetime must be > 0");
    }
    if (!(saturation >= 0.0)) {
        throw std::domain_error("ScatteringParams: saturation must be >= 0");
    }
    if (!std::isfinite(antitrap_factor)) {
        throw std::domain_error("ScatteringParams: antitrap_factor must be finite");
    }
    if (absorption_projection < -1.0 || absorption_projection > 1.0 ||
        !std::isfinite(absorption_projection)) {
        throw std::domain_error("ScatteringParams: absorption_projection must be in [-1, 1]");
    }
}

namespace {

// Exact free rotation of (x, p/(m w)) by angle theta.
inline void rotate(double& x, double& p, double m_omega, double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double xs = x;
    x = xs * c + (p / m_omega) * s;
    p = p * c - m_omega * xs * s;
}

// Closed-form propagation for an excited interval tau with the trap
// curvature scaled by `factor`: rotation for factor > 0, free flight at
// factor = 0, hyperbolic spreading for the anti-trapped case.
inline void propagate_excited(double& x, double& p, double mass, double omega,
                              double factor, double tau) {
    if (factor > 0.0) {
        const double we = omega * std::sqrt(factor);
        rotate(x, p, mass * we, we * tau);
    } else if (factor == 0.0) {
        x += p * tau / mass;
    } else {
        const double we = omega * std::sqrt(-factor);
        const double ch = std::cosh(we * tau);
        const double sh = std::sinh(we * tau);
        const double mwe = mass * we;
        const double xs = x;
        x = xs * ch + (p / mwe) * sh;
        p = mwe * xs * sh + p * ch;
    }
}

// Axial component of the emission direction, in [-1, 1].
inline double emission_axial(RandomStream& rng, EmissionPattern pattern) {
    switch (pattern) {
        case EmissionPattern::isotropic:
            return rng.uniform(-1.0, 1.0);
        case EmissionPattern::axial_only:
            return rng.uniform() < 0.5 ? -1.0 : 1.0;
        case EmissionPattern::dipole:
            break;
    }
    // sigma-transition dipole pattern about the axis: pdf (3/8)(1 + u^2),
    // sampled by rejection against the uniform proposal.
    for (;;) {
        const double u = rng.uniform(-1.0, 1.0);
        if (rng.uniform() * 2.0 <= 1.0 + u * u) return u;
    }
}

}  // namespace

Ensemble evolve(const PhysicalConstants& c, const Ensemble& ensemble,
                double duration, const TrapModel& trap,
                const ScatteringParams& scat, std::uint64_t seed, int workers) {
    scat.validate();
    if (!(duration >= 0.0) || !std::isfinite(duration)) {
        throw std::domain_error("evolve: duration must be finite and >= 0");
    }
    if (ensemble.samples.empty()) throw std::domain_error("evolve: empty ensemble");

    const double omega = trap_frequencies(trap, trap.depth_mk).axial;
    const double mass = ensemble.mass > 0.0 ? ensemble.mass : c.mass;
    const double m_omega = mass * omega;
    const double hbar_k = c.recoil_momentum();

    Ensemble out = ensemble;
    out.omega = omega;
    out.mass = mass;
    out.time = ensemble.time + duration;
    out.seed = seed;

    auto* samples = out.samples.data();
    const std::size_t n = out.samples.size();
    detail::parallel_for(n, workers, [&](std::size_t j) {
        RandomStream rng(seed, j);
        double x = samples[j].x;
        double p = samples[j].p;
        double remaining = duration;

        if (scat.rate > 0.0) {
            while (remaining > 0.0) {
                const double wait = rng.exponential(1.0 / scat.rate);
                if (wait >= remaining) break;
                rotate(x, p, m_omega, omega * wait);
                remaining -= wait;

                // The probe is retro-reflected, so absorption comes from either
                // direction with equal odds: the mean radiation pressure
                // cancels while each kick still adds (proj * hbar k)^2 of
                // momentum variance.
                const double sign = rng.uniform() < 0.5 ? 1.0 : -1.0;
                p += sign * hbar_k * scat.absorption_projection;

                const double tau = rng.exponential(scat.excited_lifetime);
                const double tau_used = tau < remaining ? tau : remaining;
                propagate_excited(x, p, mass, omega, scat.antitrap_factor, tau_used);
                remaining -= tau_used;
                if (tau_used < tau) {
                    // Window closed mid-excitation; the photon leaves later.
                    remaining = 0.0;
                    break;
                }
                p += hbar_k * emission_axial(rng, scat.emission_pattern);
            }
        }
        if (remaining > 0.0) rotate(x, p, m_omega, omega * remaining);
        samples[j].x = x;
        samples[j].p = p;
    });
    return out;
}

namespace {

std::size_t checked_bin_count(double total_time, double bin_width) {
    if (!(bin_width > 0.0) || !(total_time > 0.0)) {
        throw std::domain_error("time binning: total_time and bin_width must be > 0");
    }
    const double ratio = total_time / bin_width;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * rounded) {
        throw std::domain_error("time binning: bin_width must divide total_time");
    }
    return static_cast<std::size_t>(rounded);
}

}  // namespace

std::vector<Ensemble> bin_center_ensembles(const PhysicalConstants& c,
                                           const MotionalState& state,
                                           const TrapModel& trap,
                                           const ScatteringParams& scat,
                                           double total_time, double bin_width,
                                           std::size_t n, std::uint64_t seed,
                                           int workers) {
    const std::size_t bins = checked_bin_count(total_time, bin_width);
    if (n < 1000) {
        throw std::domain_error("time binning: need n >= 1000 samples");
    }

    std::vector<Ensemble> centers;
    centers.reserve(bins);
    Ensemble ens = sample_wigner(c, state, n, seed, workers);
    ens = evolve(c, ens, 0.5 * bin_width, trap, scat,
                 RandomStream::derive_seed(seed, 1), workers);
    centers.push_back(ens);
    for (std::size_t b = 1; b < bins; ++b) {
        ens = evolve(c, ens, bin_width, trap, scat,
                     RandomStream::derive_seed(seed, b + 1), workers);
        centers.push_back(ens);
    }
    return centers;
}

VisibilitySeries time_binned_visibility(const PhysicalConstants& c,
                                        const MotionalState& state,
                                        const TrapModel& trap,
                                        const ScatteringParams& scat,
                                        double total_time, double bin_width,
                                        std::size_t n, std::uint64_t seed,
                                        int workers) {
    const std::size_t bins = checked_bin_count(total_time, bin_width);
    const double k_axial = c.photon_wavenumber();

    VisibilitySeries series;
    series.bin_edges.resize(bins + 1);
    for (std::size_t b = 0; b <= bins; ++b) {
        series.bin_edges[b] = bin_width * static_cast<double>(b);
    }

    const auto centers = bin_center_ensembles(c, state, trap, scat, total_time,
                                              bin_width, n, seed, workers);
    for (const auto& ens : centers) {
        const auto est = visibility_estimator(ens, k_axial);
        series.visibility.push_back(est.visibility);
        series.stderror.push_back(est.stderror);
        series.nbar.push_back(nbar_estimate(c, ens));
    }
    return series;
}

}  // namespace atomslit
