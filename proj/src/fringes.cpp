#include "atomslit/fringes.hpp"

#include "atomslit/constants.hpp"
#include "atomslit/errors.hpp"
#include "atomslit/io.hpp"
#include "atomslit/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

namespace atomslit {

void FringeDataset::validate() const {
    const std::size_t n = phases.size();
    if (n < 4)
        throw ValidationError("fringe: need at least 4 phase points, got " +
                              std::to_string(n));
    if (counts_1.size() != n || counts_2.size() != n)
        throw ValidationError("fringe: phases/counts lengths differ");
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(phases[i]) || !std::isfinite(counts_1[i]) ||
            !std::isfinite(counts_2[i]))
            throw ValidationError("fringe: non-finite entry at index " + std::to_string(i));
        if (counts_1[i] < 0.0 || counts_2[i] < 0.0)
            throw ValidationError("fringe: negative counts at index " + std::to_string(i));
    }
}

FringeDataset synthesize_fringe(double visibility, double phase_offset,
                                std::size_t n_points, double mean_counts,
                                double phase_noise_rms, std::uint64_t seed,
                                bool poisson) {
    if (visibility < 0.0 || visibility > 1.0)
        throw ValidationError("synthesize_fringe: visibility outside [0, 1]");
    if (n_points < 4) throw ValidationError("synthesize_fringe: need n_points >= 4");
    if (!(mean_counts >= 1.0))
        throw ValidationError("synthesize_fringe: mean_counts must be >= 1");
    if (phase_noise_rms < 0.0)
        throw ValidationError("synthesize_fringe: phase_noise_rms must be >= 0");

    FringeDataset d;
    d.phases.resize(n_points);
    d.counts_1.resize(n_points);
    d.counts_2.resize(n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
        const double phi = two_pi * static_cast<double>(i) / static_cast<double>(n_points);
        d.phases[i] = phi;
        RandomStream rng(seed, static_cast<std::uint64_t>(i));
        const double jitter = phase_noise_rms > 0.0 ? phase_noise_rms * rng.normal() : 0.0;
        const double c = std::cos(phi + phase_offset + jitter);
        const double mu1 = 0.5 * mean_counts * (1.0 + visibility * c);
        const double mu2 = 0.5 * mean_counts * (1.0 - visibility * c);
        if (poisson) {
            d.counts_1[i] = static_cast<double>(rng.poisson(mu1));
            d.counts_2[i] = static_cast<double>(rng.poisson(mu2));
        } else {
            d.counts_1[i] = mu1;
            d.counts_2[i] = mu2;
        }
    }
    return d;
}

FringeFit fit_fringe(const FringeDataset& data) {
    data.validate();
    const std::size_t n = data.phases.size();

    std::vector<double> phi, u, w, tot;
    int dropped = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double ti = data.counts_1[i] + data.counts_2[i];
        if (ti <= 0.0) {
            ++dropped;
            continue;
        }
        const double ui = (data.counts_1[i] - data.counts_2[i]) / ti;
        // Binomial-splitting variance of the unbalance; the floor keeps
        // saturated points (u = +/-1) at finite weight.
        const double var = std::max((1.0 - ui * ui) / ti, 1.0 / (ti * ti));
        phi.push_back(data.phases[i]);
        u.push_back(ui);
        w.push_back(1.0 / var);
        tot.push_back(ti);
    }
    if (phi.size() < 4)
        throw FitError("fit_fringe: fewer than 4 usable phase points");
    const auto [mn, mx] = std::minmax_element(phi.begin(), phi.end());
    if (!(*mx - *mn > pi))
        throw FitError("fit_fringe: phase points span no more than half a period");

    // Two weighted linear solves in the (cos, sin, 1) basis. Variances built
    // from the measured unbalance correlate with its own noise and drag the
    // amplitude high, so after the first pass the weights are rebuilt from the
    // binomial variance evaluated on the fitted curve.
    Eigen::Vector3d theta = Eigen::Vector3d::Zero();
    Eigen::Matrix3d cov_lin = Eigen::Matrix3d::Identity();
    for (int pass = 0; pass < 2; ++pass) {
        Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
        Eigen::Vector3d v = Eigen::Vector3d::Zero();
        for (std::size_t i = 0; i < phi.size(); ++i) {
            const Eigen::Vector3d x(std::cos(phi[i]), std::sin(phi[i]), 1.0);
            m += w[i] * x * x.transpose();
            v += w[i] * u[i] * x;
        }
        const double scale = m.trace() / 3.0;
        if (!(std::fabs(m.determinant()) > 1e-12 * scale * scale * scale))
            throw FitError("fit_fringe: degenerate phase design");
        theta = m.ldlt().solve(v);
        cov_lin = m.inverse();
        if (pass == 0) {
            for (std::size_t i = 0; i < phi.size(); ++i) {
                const double mi = theta[0] * std::cos(phi[i]) +
                                  theta[1] * std::sin(phi[i]) + theta[2];
                // |mi| >= 1 makes (1 - mi^2) non-positive; the floor catches it.
                const double var =
                    std::max((1.0 - mi * mi) / tot[i], 1.0 / (tot[i] * tot[i]));
                w[i] = 1.0 / var;
            }
        }
    }

    const double alpha = theta[0];
    const double beta = theta[1];
    const double base = theta[2];
    const double amp = std::hypot(alpha, beta);

    FringeFit fit;
    fit.dropped_points = dropped;
    fit.baseline = base;
    fit.visibility = amp;
    fit.phase_offset = amp > 0.0 ? std::atan2(-beta, alpha) : 0.0;

    double chi2 = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        const double model = alpha * std::cos(phi[i]) + beta * std::sin(phi[i]) + base;
        chi2 += w[i] * (u[i] - model) * (u[i] - model);
    }
    fit.chi2 = chi2;
    fit.ndof = static_cast<int>(phi.size()) - 3;

    Eigen::Matrix3d jac = Eigen::Matrix3d::Zero();
    if (amp > 1e-12) {
        jac(0, 0) = alpha / amp;
        jac(0, 1) = beta / amp;
        jac(1, 0) = beta / (amp * amp);
        jac(1, 1) = -alpha / (amp * amp);
        jac(2, 2) = 1.0;
        fit.covariance = jac * cov_lin * jac.transpose();
        fit.visibility_err = std::sqrt(std::max(fit.covariance(0, 0), 0.0));
        fit.phase_offset_err = std::sqrt(std::max(fit.covariance(1, 1), 0.0));
        fit.baseline_err = std::sqrt(std::max(fit.covariance(2, 2), 0.0));
    } else {
        // Amplitude consistent with zero: direction is unconstrained.
        fit.covariance = cov_lin;
        fit.visibility_err =
            std::sqrt(std::max(0.5 * (cov_lin(0, 0) + cov_lin(1, 1)), 0.0));
        fit.phase_offset_err = pi;
        fit.baseline_err = std::sqrt(std::max(cov_lin(2, 2), 0.0));
    }

    if (fit.visibility > 1.0 + 3.0 * fit.visibility_err)
        throw FitError("fit_fringe: fitted visibility exceeds 1 beyond 3 sigma");
    return fit;
}

BootstrapResult bootstrap_fringe(const FringeDataset& data, std::size_t replicates,
                                 std::uint64_t seed) {
    data.validate();
    if (replicates < 2)
        throw ValidationError("bootstrap_fringe: need at least 2 replicates");
    fit_fringe(data);  // the observed dataset itself must be fittable

    std::vector<double> vis;
    vis.reserve(replicates);
    for (std::size_t rep = 0; rep < replicates; ++rep) {
        RandomStream rng(seed, static_cast<std::uint64_t>(rep));
        FringeDataset r = data;
        for (std::size_t i = 0; i < data.phases.size(); ++i) {
            r.counts_1[i] = static_cast<double>(rng.poisson(data.counts_1[i]));
            r.counts_2[i] = static_cast<double>(rng.poisson(data.counts_2[i]));
        }
        try {
            vis.push_back(fit_fringe(r).visibility);
        } catch (const FitError&) {
            // Degenerate replicate (all counts zero, say); skip it.
        }
    }
    if (vis.size() < 2) throw FitError("bootstrap_fringe: too few successful replicates");

    double mean = 0.0;
    for (double x : vis) mean += x;
    mean /= static_cast<double>(vis.size());
    double var = 0.0;
    for (double x : vis) var += (x - mean) * (x - mean);
    var /= static_cast<double>(vis.size() - 1);

    BootstrapResult out;
    out.visibility_mean = mean;
    out.visibility_std = std::sqrt(var);
    out.replicates = vis.size();
    return out;
}

void PhaseLockModel::validate() const {
    if (!(residual_rms > 0.0)) throw ValidationError("lock: residual_rms must be > 0");
    if (!(beat_frequency > 0.0)) throw ValidationError("lock: beat_frequency must be > 0");
    if (!(actuator_range > 0.0)) throw ValidationError("lock: actuator_range must be > 0");
    if (drift_rate < 0.0) throw ValidationError("lock: drift_rate must be >= 0");
    if (servo_bandwidth < 0.0) throw ValidationError("lock: servo_bandwidth must be >= 0");
    if (thermal_amp < 0.0) throw ValidationError("lock: thermal_amp must be >= 0");
    if (thermal_freq < 0.0) throw ValidationError("lock: thermal_freq must be >= 0");
}

LockSimResult lock_residual_simulation(const PhaseLockModel& model, double duration,
                                       std::uint64_t seed) {
    model.validate();
    if (!(duration > 0.0))
        throw ValidationError("lock_residual_simulation: duration must be > 0");

    const double bw = model.servo_bandwidth;
    double dt = 1e-3;
    if (bw > 0.0) dt = std::min(dt, 1.0 / (40.0 * bw));
    if (model.thermal_freq > 0.0) dt = std::min(dt, 1.0 / (200.0 * model.thermal_freq));
    const auto steps = static_cast<std::size_t>(std::ceil(duration / dt));
    if (steps > 5'000'000)
        throw ValidationError("lock_residual_simulation: time grid too large");

    // Integrating servo in velocity form: act += g * err with the unity-gain
    // crossover at the servo bandwidth (g = 2 pi bw dt). The time grid keeps
    // g <= ~0.16, so the discrete pole at 1 - g is well damped, and clamping
    // the actuator state directly doubles as anti-windup.
    const double gain = bw > 0.0 ? two_pi * bw * dt : 0.0;
    const double half_range = 0.5 * model.actuator_range;

    RandomStream rng(seed, 0);
    const double walk_step = model.drift_rate * std::sqrt(dt);

    LockSimResult out;
    const std::size_t stride = steps / 200'000 + 1;
    out.time.reserve(steps / stride + 1);
    out.phase.reserve(steps / stride + 1);

    double env = 0.0, act = 0.0, sum_sq = 0.0;
    std::size_t saturated = 0;
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) * dt;
        env += walk_step * rng.normal();
        const double disturbance =
            env + model.thermal_amp * std::sin(two_pi * model.thermal_freq * t);
        const double err = disturbance - act;
        sum_sq += err * err;
        if (k % stride == 0) {
            out.time.push_back(t);
            out.phase.push_back(err);
        }
        if (bw > 0.0) {
            double a = act + gain * err;
            if (std::fabs(a) > half_range) {
                a = std::clamp(a, -half_range, half_range);
                ++saturated;
            }
            act = a;
        }
    }
    out.rms = std::sqrt(sum_sq / static_cast<double>(steps));
    out.locked =
        bw > 0.0 && static_cast<double>(saturated) < 0.01 * static_cast<double>(steps);
    return out;
}

double visibility_budget(double v_quantum, double nbar, double phase_noise_rms) {
    if (!(v_quantum > 0.0) || v_quantum > 1.0)
        throw ValidationError("visibility_budget: v_quantum must be in (0, 1]");
    if (!(nbar >= 0.0)) throw ValidationError("visibility_budget: nbar must be >= 0");
    if (phase_noise_rms < 0.0)
        throw ValidationError("visibility_budget: phase_noise_rms must be >= 0");
    return std::pow(v_quantum, 2.0 * nbar + 1.0) *
           std::exp(-0.5 * phase_noise_rms * phase_noise_rms);
}

void write_fringe_csv(const std::filesystem::path& path, const FringeDataset& d) {
    d.validate();
    std::vector<std::vector<double>> rows;
    rows.reserve(d.phases.size());
    for (std::size_t i = 0; i < d.phases.size(); ++i)
        rows.push_back({d.phases[i], d.counts_1[i], d.counts_2[i]});
    io::write_csv(path, {"phase_rad", "c1", "c2"}, rows);
}

FringeDataset read_fringe_csv(const std::filesystem::path& path) {
    const io::CsvTable t = io::read_csv(path);
    if (t.header != std::vector<std::string>{"phase_rad", "c1", "c2"})
        throw ValidationError("fringe csv: expected header phase_rad,c1,c2");
    FringeDataset d;
    for (const auto& row : t.rows) {
        d.phases.push_back(row[0]);
        d.counts_1.push_back(row[1]);
        d.counts_2.push_back(row[2]);
    }
    d.validate();
    return d;
}

void write_phase_trace_csv(const std::filesystem::path& path, const LockSimResult& r) {
    std::vector<std::vector<double>> rows;
    rows.reserve(r.time.size());
    for (std::size_t i = 0; i < r.time.size(); ++i)
        rows.push_back({r.time[i], r.phase[i]});
    io::write_csv(path, {"t_s", "phase_rad"}, rows);
}

}  // namespace atomslit
