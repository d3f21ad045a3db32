#pragma once

#include <cstdint>
#include <vector>

#include "atomslit/constants.hpp"
#include "atomslit/motional.hpp"

namespace atomslit {

struct PhaseSpaceSample {
    double x;  // m
    double p;  // kg m/s
};

// Monte Carlo discretization of the atom's Wigner distribution. For Gaussian
// states, classical (x, p) sampling reproduces every symmetric-moment
// observable we use. omega/mass are carried along so estimators downstream
// do not need the originating state.
struct Ensemble {
    std::vector<PhaseSpaceSample> samples;
    double time = 0.0;       // s
    std::uint64_t seed = 0;
    double omega = 0.0;      // rad/s
    double mass = 0.0;       // kg
};

struct VisibilityEstimate {
    double visibility;
    double stderror;  // jackknife over sample batches
};

struct WignerGrid {
    std::vector<double> x_edges;   // size nx + 1
    std::vector<double> p_edges;   // size np + 1
    std::vector<double> density;   // row-major [ix * np + ip], sums to 1

    double x_center(std::size_t ix) const { return 0.5 * (x_edges[ix] + x_edges[ix + 1]); }
    double p_center(std::size_t ip) const { return 0.5 * (p_edges[ip] + p_edges[ip + 1]); }
    std::size_t nx() const { return x_edges.size() - 1; }
    std::size_t np() const { return p_edges.size() - 1; }
};

// Draw n independent (x, p) samples from the state's Gaussian Wigner
// distribution. Sample j comes from stream (seed, j), so the ensemble is
// reproducible for any partitioning. workers = 0 picks a thread count
// automatically; the result is bit-identical for every choice.
Ensemble sample_wigner(const PhysicalConstants& c, const MotionalState& state,
                       std::size_t n, std::uint64_t seed, int workers = 0);

// Fringe visibility of the ensemble: V = |<exp(i 2 k x)>|, the magnitude of
// the momentum-displacement characteristic function at delta = 2 hbar k.
// Standard error by delete-batch jackknife.
VisibilityEstimate visibility_estimator(const Ensemble& ensemble, double k_axial);

// Instantaneous mean phonon number from raw second moments:
// nbar = (<p^2>/(m w) + m w <x^2>) / (2 hbar) - 1/2.
double nbar_estimate(const PhysicalConstants& c, const Ensemble& ensemble);

// Mean energy <p^2/2m + m w^2 x^2 / 2> and its standard error.
struct EnergyEstimate {
    double mean;
    double stderror;
};
EnergyEstimate energy_estimate(const Ensemble& ensemble);

// Normalized 2D histogram over [x_range] x [p_range]; samples outside the
// window are dropped. Throws if the window catches no samples.
WignerGrid wigner_histogram(const Ensemble& ensemble,
                            double x_min, double x_max,
                            double p_min, double p_max,
                            std::size_t bins_x, std::size_t bins_p);

}  // namespace atomslit
