#include "atomslit/thermometry.hpp"

#include "atomslit/constants.hpp"
#include "atomslit/errors.hpp"
#include "atomslit/io.hpp"
#include "atomslit/lsq.hpp"
#include "atomslit/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

namespace atomslit {

namespace {

// Two-photon coupling scale: blue sideband amplitude at nbar = 0. Keeps the
// total transfer below unity for nbar <= 1.5.
constexpr double sideband_coupling = 0.4;

double lorentzian(double delta, double center, double fwhm) {
    const double u = 2.0 * (delta - center) / fwhm;
    return 1.0 / (1.0 + u * u);
}

double triplet(double delta, double a_red, double a_carrier, double a_blue,
               double splitting, double fwhm) {
    const double s = std::fabs(splitting);
    const double g = std::fabs(fwhm);
    return a_red * lorentzian(delta, -s, g) + a_carrier * lorentzian(delta, 0.0, g) +
           a_blue * lorentzian(delta, s, g);
}

}  // namespace

void SidebandSpectrum::validate() const {
    if (detunings.size() < 15)
        throw ValidationError("spectrum: need at least 15 points, got " +
                              std::to_string(detunings.size()));
    if (transfer.size() != detunings.size() || uncertainty.size() != detunings.size())
        throw ValidationError("spectrum: detunings/transfer/uncertainty lengths differ");
    for (std::size_t i = 0; i < detunings.size(); ++i) {
        if (!std::isfinite(detunings[i]) || !std::isfinite(transfer[i]) ||
            !std::isfinite(uncertainty[i]))
            throw ValidationError("spectrum: non-finite entry at index " + std::to_string(i));
        if (i > 0 && detunings[i] <= detunings[i - 1])
            throw ValidationError("spectrum: detunings must be strictly increasing");
        if (transfer[i] < 0.0 || transfer[i] > 1.0)
            throw ValidationError("spectrum: transfer outside [0, 1] at index " +
                                  std::to_string(i));
        if (uncertainty[i] < 0.0)
            throw ValidationError("spectrum: negative uncertainty at index " +
                                  std::to_string(i));
    }
}

SidebandSpectrum synthesize_spectrum(double nbar, double omega, double peak_width,
                                     double carrier_amp, unsigned shots_per_point,
                                     std::uint64_t noise_seed, std::size_t n_points) {
    if (!(nbar >= 0.0)) throw ValidationError("synthesize_spectrum: nbar must be >= 0");
    if (!(omega > 0.0)) throw ValidationError("synthesize_spectrum: omega must be > 0");
    if (!(peak_width > 0.0))
        throw ValidationError("synthesize_spectrum: peak_width must be > 0");
    if (!(omega > 2.0 * peak_width))
        throw ValidationError("synthesize_spectrum: sidebands unresolved (omega <= 2*width)");
    if (carrier_amp < 0.0 || carrier_amp > 1.0)
        throw ValidationError("synthesize_spectrum: carrier_amp outside [0, 1]");

    const double a_blue = sideband_coupling * (nbar + 1.0);
    const double a_red = sideband_coupling * nbar;

    const double span = omega + 5.0 * peak_width;
    if (n_points == 0) {
        const double spacing = peak_width / 24.0;
        std::size_t half = static_cast<std::size_t>(std::ceil(span / spacing));
        half = std::clamp<std::size_t>(half, 40, 1000);
        n_points = 2 * half + 1;
    }
    if (n_points < 15)
        throw ValidationError("synthesize_spectrum: n_points must be >= 15");

    SidebandSpectrum s;
    s.detunings.resize(n_points);
    s.transfer.resize(n_points);
    s.uncertainty.assign(n_points, 0.0);
    const double step = 2.0 * span / static_cast<double>(n_points - 1);
    for (std::size_t i = 0; i < n_points; ++i) {
        const double delta = -span + step * static_cast<double>(i);
        s.detunings[i] = delta;
        const double t = triplet(delta, a_red, carrier_amp, a_blue, omega, peak_width);
        if (t > 1.0)
            throw ValidationError(
                "synthesize_spectrum: model transfer exceeds 1 (amplitudes too large)");
        if (shots_per_point == 0) {
            s.transfer[i] = t;
        } else {
            RandomStream rng(noise_seed, static_cast<std::uint64_t>(i));
            unsigned hits = 0;
            for (unsigned shot = 0; shot < shots_per_point; ++shot)
                if (rng.uniform() < t) ++hits;
            const double shots = static_cast<double>(shots_per_point);
            s.transfer[i] = static_cast<double>(hits) / shots;
            // Quote the projection-noise bar from the generating probability,
            // not the sampled estimate: weights correlated with the noise bias
            // weighted fits low wherever t < 1/2. The Lorentzian tails keep
            // t in (0, 1), so the bar never collapses to zero.
            s.uncertainty[i] = std::sqrt(t * (1.0 - t) / shots);
        }
    }
    return s;
}

namespace {

struct FitSetup {
    Eigen::VectorXd y;
    Eigen::VectorXd sigma;
    std::vector<double> x;
    bool weighted = false;
};

FitSetup prepare(const SidebandSpectrum& spectrum) {
    FitSetup f;
    const std::size_t n = spectrum.detunings.size();
    f.x = spectrum.detunings;
    f.y.resize(static_cast<Eigen::Index>(n));
    f.sigma.resize(static_cast<Eigen::Index>(n));
    double min_pos = 0.0;
    for (double u : spectrum.uncertainty)
        if (u > 0.0 && (min_pos == 0.0 || u < min_pos)) min_pos = u;
    f.weighted = min_pos > 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        f.y[static_cast<Eigen::Index>(i)] = spectrum.transfer[i];
        const double u = spectrum.uncertainty[i];
        f.sigma[static_cast<Eigen::Index>(i)] = f.weighted ? std::max(u, min_pos) : 0.0;
    }
    return f;
}

LsqModel triplet_model(const std::vector<double>& x) {
    return [&x](const Eigen::VectorXd& p, Eigen::VectorXd& out) {
        for (std::size_t i = 0; i < x.size(); ++i)
            out[static_cast<Eigen::Index>(i)] = triplet(x[i], p[0], p[1], p[2], p[3], p[4]);
    };
}

// Same line shape with the red amplitude slaved to the blue one through a
// fixed ratio; used for the profile-likelihood scan over the ratio.
LsqModel ratio_model(const std::vector<double>& x, double ratio) {
    return [&x, ratio](const Eigen::VectorXd& p, Eigen::VectorXd& out) {
        for (std::size_t i = 0; i < x.size(); ++i)
            out[static_cast<Eigen::Index>(i)] =
                triplet(x[i], ratio * p[1], p[0], p[1], p[2], p[3]);
    };
}

double profile_chi2(const FitSetup& f, double ratio, const Eigen::VectorXd& init4) {
    try {
        const LsqResult r =
            levenberg_marquardt(ratio_model(f.x, ratio), f.y, f.sigma, init4, 200, 1e-12);
        return r.chi2;
    } catch (const FitError&) {
        return std::numeric_limits<double>::infinity();
    }
}

double nbar_of_ratio(double r) {
    const double rc = std::clamp(r, 0.0, 0.9999);
    return rc / (1.0 - rc);
}

}  // namespace

ThermometryFit fit_sidebands(const SidebandSpectrum& spectrum) {
    spectrum.validate();
    FitSetup f = prepare(spectrum);
    const std::size_t n = f.x.size();
    const double x_max = f.x.back();

    // Initial guesses straight off the grid: blue peak in the outer region,
    // carrier at zero detuning, width from the blue peak's half-max crossing.
    std::size_t i_blue = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (f.x[i] > 0.3 * x_max && spectrum.transfer[i] > best) {
            best = spectrum.transfer[i];
            i_blue = i;
        }
    }
    if (best < 0.0) throw FitError("fit_sidebands: no points in the blue sideband region");
    const double s0 = f.x[i_blue];
    auto nearest = [&](double target) {
        std::size_t k = 0;
        double d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            const double di = std::fabs(f.x[i] - target);
            if (di < d) {
                d = di;
                k = i;
            }
        }
        return k;
    };
    const double a_b0 = std::max(best, 1e-3);
    const double a_r0 = std::max(spectrum.transfer[nearest(-s0)], 0.0);
    const double a_c0 = std::max(spectrum.transfer[nearest(0.0)], 1e-3);
    double gamma0 = 0.0;
    for (std::size_t i = i_blue; i < n; ++i) {
        if (spectrum.transfer[i] < 0.5 * a_b0) {
            gamma0 = 2.0 * (f.x[i] - s0);
            break;
        }
    }
    const double spacing = (f.x.back() - f.x.front()) / static_cast<double>(n - 1);
    gamma0 = std::clamp(gamma0, 2.0 * spacing, s0);

    Eigen::VectorXd p0(5);
    p0 << a_r0, a_c0, a_b0, s0, gamma0;
    const LsqResult full =
        levenberg_marquardt(triplet_model(f.x), f.y, f.sigma, p0, 400, 1e-12);

    const double a_red = full.params[0];
    const double a_carrier = full.params[1];
    const double a_blue = full.params[2];
    const double splitting = std::fabs(full.params[3]);
    const double width = std::fabs(full.params[4]);

    if (!(a_blue > 0.0)) throw FitError("fit_sidebands: blue sideband amplitude <= 0");
    if (!(width < 0.8 * splitting))
        throw FitError("fit_sidebands: sidebands unresolved (width >= 0.8 * splitting)");
    for (double sign : {-1.0, 1.0}) {
        std::size_t covered = 0;
        for (double xi : f.x)
            if (std::fabs(xi - sign * splitting) <= 0.5 * width) ++covered;
        if (covered < 5)
            throw FitError("fit_sidebands: fewer than 5 points across a sideband");
    }

    const double ratio = a_red / a_blue;
    if (ratio >= 1.0)
        throw FitError(
            "fit_sidebands: red/blue ratio >= 1; occupation outside the ratio method's "
            "domain");

    ThermometryFit out;
    out.red_amp = a_red;
    out.blue_amp = a_blue;
    out.carrier_amp = a_carrier;
    out.red_amp_err = std::sqrt(std::max(full.covariance(0, 0), 0.0));
    out.blue_amp_err = std::sqrt(std::max(full.covariance(2, 2), 0.0));
    out.ratio = ratio;
    out.sideband_splitting = splitting;
    out.width = width;
    out.chi2 = full.chi2;
    out.ndof = static_cast<int>(n) - 5;
    out.nbar = nbar_of_ratio(ratio);
    out.p0 = nbar_to_population(out.nbar);

    // Linearized ratio variance from the full covariance; exact enough far
    // from r = 0 and the seed for the profile-likelihood bracketing below.
    Eigen::VectorXd g = Eigen::VectorXd::Zero(5);
    g[0] = 1.0 / a_blue;
    g[2] = -a_red / (a_blue * a_blue);
    double sigma_r = std::sqrt(std::max(g.dot(full.covariance * g), 0.0));

    double r_lo = ratio, r_hi = ratio;
    if (f.weighted && sigma_r > 0.0) {
        Eigen::VectorXd init4(4);
        init4 << a_carrier, a_blue, splitting, width;
        const double chi2_min = full.chi2;
        auto crossing = [&](double direction) {
            double step = std::max(sigma_r, 1e-4);
            double lo = ratio;
            double hi = ratio;
            for (int k = 0; k < 40; ++k) {
                hi = ratio + direction * step;
                if (direction > 0.0) hi = std::min(hi, 0.9999);
                else hi = std::max(hi, -0.9999);
                if (profile_chi2(f, hi, init4) - chi2_min >= 1.0) break;
                lo = hi;
                if (hi == 0.9999 || hi == -0.9999) return hi;
                step *= 2.0;
            }
            for (int k = 0; k < 60; ++k) {
                const double mid = 0.5 * (lo + hi);
                const double d = profile_chi2(f, mid, init4) - chi2_min;
                if (std::fabs(d - 1.0) < 1e-3) return mid;
                if (d < 1.0) lo = mid;
                else hi = mid;
            }
            return 0.5 * (lo + hi);
        };
        r_hi = crossing(+1.0);
        r_lo = crossing(-1.0);
    } else {
        r_hi = ratio + sigma_r;
        r_lo = ratio - sigma_r;
    }

    const double nbar_hi = nbar_of_ratio(r_hi);
    const double nbar_lo = nbar_of_ratio(r_lo);
    out.nbar_err_hi = std::max(nbar_hi - out.nbar, 0.0);
    out.nbar_err_lo = std::max(out.nbar - nbar_lo, 0.0);
    out.p0_err_lo = out.p0 - nbar_to_population(out.nbar + out.nbar_err_hi);
    out.p0_err_hi = nbar_to_population(std::max(out.nbar - out.nbar_err_lo, 0.0)) - out.p0;
    return out;
}

double nbar_to_population(double nbar) {
    if (!(nbar >= 0.0)) throw ValidationError("nbar_to_population: nbar must be >= 0");
    return 1.0 / (1.0 + nbar);
}

double population_to_nbar(double p0) {
    if (!(p0 > 0.0) || p0 > 1.0)
        throw ValidationError("population_to_nbar: p0 must be in (0, 1]");
    return 1.0 / p0 - 1.0;
}

void write_spectrum_csv(const std::filesystem::path& path, const SidebandSpectrum& s) {
    s.validate();
    std::vector<std::vector<double>> rows;
    rows.reserve(s.detunings.size());
    for (std::size_t i = 0; i < s.detunings.size(); ++i)
        rows.push_back({s.detunings[i] / (two_pi * 1e3), s.transfer[i], s.uncertainty[i]});
    io::write_csv(path, {"detuning_khz", "transfer", "sigma"}, rows);
}

SidebandSpectrum read_spectrum_csv(const std::filesystem::path& path) {
    const io::CsvTable t = io::read_csv(path);
    if (t.header != std::vector<std::string>{"detuning_khz", "transfer", "sigma"})
        throw ValidationError("spectrum csv: expected header detuning_khz,transfer,sigma");
    SidebandSpectrum s;
    for (const auto& row : t.rows) {
        s.detunings.push_back(row[0] * two_pi * 1e3);
        s.transfer.push_back(row[1]);
        s.uncertainty.push_back(row[2]);
    }
    s.validate();
    return s;
}

}  // namespace atomslit
