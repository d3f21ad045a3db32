#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace atomslit {

// Raman sideband spectrum: population transfer vs two-photon detuning from
// the carrier. Detunings in rad/s, strictly increasing.
struct SidebandSpectrum {
    std::vector<double> detunings;
    std::vector<double> transfer;     // in [0, 1]
    std::vector<double> uncertainty;  // 1 sigma per point; 0 = unknown

    void validate() const;
};

// Result of the ratio method: nbar from A_red/A_blue = nbar/(nbar + 1).
// Asymmetric 1-sigma intervals come from profile likelihood on the ratio,
// which matters near nbar = 0. The method assumes a thermal motional state
// and resolved sidebands; both assumptions are recorded with the fit.
struct ThermometryFit {
    double nbar = 0.0;
    double nbar_err_lo = 0.0;
    double nbar_err_hi = 0.0;
    double p0 = 1.0;  // ground-state population 1/(1 + nbar)
    double p0_err_lo = 0.0;
    double p0_err_hi = 0.0;
    double red_amp = 0.0;
    double blue_amp = 0.0;
    double carrier_amp = 0.0;
    double red_amp_err = 0.0;
    double blue_amp_err = 0.0;
    double ratio = 0.0;                // red_amp / blue_amp
    double sideband_splitting = 0.0;   // rad/s
    double width = 0.0;                // rad/s, Lorentzian FWHM
    double chi2 = 0.0;
    int ndof = 0;
    bool assumes_thermal_state = true;
    bool assumes_resolved_sidebands = true;
};

// Forward model: three power-broadened Lorentzian lines at {-omega, 0,
// +omega} with red/blue amplitudes in the thermal ratio nbar/(nbar + 1).
// shots_per_point > 0 adds binomial sampling noise and per-point
// uncertainties; 0 gives the noiseless expectation. n_points = 0 picks a grid
// fine enough to resolve peak_width.
SidebandSpectrum synthesize_spectrum(double nbar, double omega, double peak_width,
                                     double carrier_amp,
                                     unsigned shots_per_point,
                                     std::uint64_t noise_seed,
                                     std::size_t n_points = 0);

// Least-squares fit of carrier + two sidebands with a shared width, then the
// ratio inversion nbar = r/(1 - r). Throws FitError when r >= 1 (outside the
// ratio method's domain) or when the fit does not converge.
ThermometryFit fit_sidebands(const SidebandSpectrum& spectrum);

double nbar_to_population(double nbar);
double population_to_nbar(double p0);

// CSV exchange format: detuning_khz, transfer, sigma.
void write_spectrum_csv(const std::filesystem::path& path, const SidebandSpectrum& s);
SidebandSpectrum read_spectrum_csv(const std::filesystem::path& path);

}  // namespace atomslit
