#include "atomslit/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "atomslit/rng.hpp"
#include "parallel.hpp"

namespace atomslit {

Ensemble sample_wigner(const PhysicalConstants& c, const MotionalState& state,
                       std::size_t n, std::uint64_t seed, int workers) {
    state.validate();
    if (n == 0) throw std::domain_error("sample_wigner: need at least one sample");

    const double sx = state.sigma_x(c);
    const double sp = state.sigma_p(c);

    Ensemble ens;
    ens.samples.resize(n);
    ens.time = 0.0;
    ens.seed = seed;
    ens.omega = state.omega;
    ens.mass = state.mass;

    auto* out = ens.samples.data();
    detail::parallel_for(n, workers, [&](std::size_t j) {
        RandomStream rng(seed, j);
        out[j].x = sx * rng.normal();
        out[j].p = sp * rng.normal();
    });
    return ens;
}

VisibilityEstimate visibility_estimator(const Ensemble& ensemble, double k_axial) {
    const std::size_t n = ensemble.samples.size();
    if (n == 0) throw std::domain_error("visibility_estimator: empty ensemble");

    // Delete-batch jackknife on the complex mean Z = <exp(i 2 k x)>.
    const std::size_t batches = std::min<std::size_t>(n, 50);
    std::vector<std::complex<double>> batch_sum(batches, {0.0, 0.0});
    std::vector<std::size_t> batch_count(batches, 0);
    for (std::size_t j = 0; j < n; ++j) {
        const double phase = 2.0 * k_axial * ensemble.samples[j].x;
        batch_sum[j % batches] += std::complex<double>(std::cos(phase), std::sin(phase));
        ++batch_count[j % batches];
    }
    std::complex<double> total{0.0, 0.0};
    for (const auto& s : batch_sum) total += s;

    const double v = std::abs(total) / static_cast<double>(n);
    if (batches < 2) return {v, 0.0};

    std::vector<double> loo(batches);
    double loo_mean = 0.0;
    for (std::size_t b = 0; b < batches; ++b) {
        loo[b] = std::abs(total - batch_sum[b]) / static_cast<double>(n - batch_count[b]);
        loo_mean += loo[b];
    }
    loo_mean /= static_cast<double>(batches);
    double ss = 0.0;
    for (double l : loo) ss += (l - loo_mean) * (l - loo_mean);
    const double nb = static_cast<double>(batches);
    const double se = std::sqrt((nb - 1.0) / nb * ss);
    return {v, se};
}

double nbar_estimate(const PhysicalConstants& c, const Ensemble& ensemble) {
    const std::size_t n = ensemble.samples.size();
    if (n == 0) throw std::domain_error("nbar_estimate: empty ensemble");
    if (!(ensemble.omega > 0.0) || !(ensemble.mass > 0.0)) {
        throw std::domain_error("nbar_estimate: ensemble lacks omega/mass");
    }
    double xx = 0.0, pp = 0.0;
    for (const auto& s : ensemble.samples) {
        xx += s.x * s.x;
        pp += s.p * s.p;
    }
    xx /= static_cast<double>(n);
    pp /= static_cast<double>(n);
    const double mw = ensemble.mass * ensemble.omega;
    return (pp / mw + mw * xx) / (2.0 * c.hbar) - 0.5;
}

EnergyEstimate energy_estimate(const Ensemble& ensemble) {
    const std::size_t n = ensemble.samples.size();
    if (n == 0) throw std::domain_error("energy_estimate: empty ensemble");
    const double m = ensemble.mass;
    const double w = ensemble.omega;
    double sum = 0.0, sumsq = 0.0;
    for (const auto& s : ensemble.samples) {
        const double e = s.p * s.p / (2.0 * m) + 0.5 * m * w * w * s.x * s.x;
        sum += e;
        sumsq += e * e;
    }
    const double mean = sum / static_cast<double>(n);
    const double var = sumsq / static_cast<double>(n) - mean * mean;
    return {mean, std::sqrt(std::max(var, 0.0) / static_cast<double>(n))};
}

WignerGrid wigner_histogram(const Ensemble& ensemble,
                            double x_min, double x_max,
                            double p_min, double p_max,
                            std::size_t bins_x, std::size_t bins_p) {
    if (bins_x < 2 || bins_p < 2) {
        throw std::domain_error("wigner_histogram: need at least 2 bins per axis");
    }
    if (!(x_max > x_min) || !(p_max > p_min)) {
        throw std::domain_error("wigner_histogram: degenerate range");
    }

    WignerGrid grid;
    grid.x_edges.resize(bins_x + 1);
    grid.p_edges.resize(bins_p + 1);
    for (std::size_t i = 0; i <= bins_x; ++i) {
        grid.x_edges[i] = x_min + (x_max - x_min) * static_cast<double>(i) / static_cast<double>(bins_x);
    }
    for (std::size_t i = 0; i <= bins_p; ++i) {
        grid.p_edges[i] = p_min + (p_max - p_min) * static_cast<double>(i) / static_cast<double>(bins_p);
    }
    grid.density.assign(bins_x * bins_p, 0.0);

    const double dx = (x_max - x_min) / static_cast<double>(bins_x);
    const double dp = (p_max - p_min) / static_cast<double>(bins_p);
    std::size_t inside = 0;
    for (const auto& s : ensemble.samples) {
        if (s.x < x_min || s.x >= x_max || s.p < p_min || s.p >= p_max) continue;
        const auto ix = static_cast<std::size_t>((s.x - x_min) / dx);
        const auto ip = static_cast<std::size_t>((s.p - p_min) / dp);
        grid.density[std::min(ix, bins_x - 1) * bins_p + std::min(ip, bins_p - 1)] += 1.0;
        ++inside;
    }
    if (inside == 0) {
        throw std::domain_error("wigner_histogram: no samples inside the window");
    }
    for (double& d : grid.density) d /= static_cast<double>(inside);
    return grid;
}

}  // namespace atomslit
