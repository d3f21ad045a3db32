#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace atomslit {

struct FringeMeta {
    double depth_mk = 0.0;
    std::string note;
};

// Two-port interferometer scan: photon counts in each output arm vs analysis
// phase. Counts are integers when Poisson-sampled; noiseless synthesis stores
// the real-valued expectations so exact fits stay exact.
struct FringeDataset {
    std::vector<double> phases;    // rad
    std::vector<double> counts_1;  // >= 0
    std::vector<double> counts_2;  // >= 0
    FringeMeta meta;

    void validate() const;
};

// Sinusoid fit to the normalized unbalance u = (C1 - C2)/(C1 + C2):
// u(phi) = A cos(phi + phi0) + b, matching the synthesis convention.
// Covariance is ordered (A, phi0, b).
struct FringeFit {
    double visibility = 0.0;
    double visibility_err = 0.0;
    double phase_offset = 0.0;
    double phase_offset_err = 0.0;
    double baseline = 0.0;
    double baseline_err = 0.0;
    Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();
    double chi2 = 0.0;
    int ndof = 0;
    int dropped_points = 0;  // zero-total-count points excluded from the fit
};

// Draws a fringe scan at evenly spaced phases in [0, 2pi). Each point gets
// independent Gaussian phase jitter of rms phase_noise_rms, then the two arm
// counts are Poisson samples of mean_counts*(1 +/- V cos(phi + offset))/2.
// poisson = false keeps the expectations (useful as a noiseless reference).
FringeDataset synthesize_fringe(double visibility, double phase_offset,
                                std::size_t n_points, double mean_counts,
                                double phase_noise_rms, std::uint64_t seed,
                                bool poisson = true);

// Weighted linear least squares in (cos phi, sin phi, 1), with per-point
// variance (1 - u^2)/(C1 + C2) floored at 1/(C1 + C2)^2. Requires >= 4
// retained points spanning more than half a period; rejects fits with
// visibility above 1 by more than 3 sigma.
FringeFit fit_fringe(const FringeDataset& data);

struct BootstrapResult {
    double visibility_mean = 0.0;
    double visibility_std = 0.0;
    std::size_t replicates = 0;
};

// Parametric bootstrap: Poisson-resample the observed counts, refit each
// replicate. Replicates use independent counter-based streams, so the result
// does not depend on evaluation order.
BootstrapResult bootstrap_fringe(const FringeDataset& data, std::size_t replicates,
                                 std::uint64_t seed);

// Optical path-length servo between the two Raman beam paths. The residual
// phase target and actuator span are the published operating point; drift and
// thermal terms set the open-loop disturbance the servo has to cancel.
struct PhaseLockModel {
    double residual_rms = 16.5e-3;   // rad, closed-loop design target
    double beat_frequency = 200e3;   // Hz, heterodyne beat used for readout
    double actuator_range = 240.0;   // rad, peak-to-peak correction span
    double drift_rate = 0.3;         // rad/sqrt(s), random-walk strength
    double servo_bandwidth = 50.0;   // Hz; 0 = open loop
    double thermal_amp = 3.0;        // rad, slow sinusoidal drift term
    double thermal_freq = 0.1;       // Hz

    void validate() const;
};

struct LockSimResult {
    double rms = 0.0;  // rms of the recorded residual phase
    bool locked = false;
    std::vector<double> time;   // s
    std::vector<double> phase;  // rad, residual (in-loop error)
};

// Time-domain servo simulation: random-walk + sinusoidal disturbance,
// integrating feedback through a range-limited actuator. Zero bandwidth runs
// open loop and reports locked = false rather than failing.
LockSimResult lock_residual_simulation(const PhaseLockModel& model, double duration,
                                       std::uint64_t seed);

// Predicted fringe visibility: quantum overlap term raised to (2 nbar + 1)
// for thermal occupation, times the Gaussian phase-noise factor
// exp(-rms^2/2).
double visibility_budget(double v_quantum, double nbar, double phase_noise_rms);

// CSV exchange formats.
void write_fringe_csv(const std::filesystem::path& path, const FringeDataset& d);
FringeDataset read_fringe_csv(const std::filesystem::path& path);
void write_phase_trace_csv(const std::filesystem::path& path, const LockSimResult& r);

}  // namespace atomslit
