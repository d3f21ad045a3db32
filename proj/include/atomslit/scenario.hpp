#pragma once

#include "atomslit/constants.hpp"
#include "atomslit/dynamics.hpp"
#include "atomslit/fringes.hpp"
#include "atomslit/motional.hpp"
#include "atomslit/trap.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace atomslit {

// Every knob of a run lives in one JSON document. Field names carry their
// units as suffixes; defaults reproduce the published experiment. Unknown
// keys are rejected so typos cannot silently fall back to defaults.

struct ScanConfig {
    std::vector<double> depths_mk;
    std::vector<double> nbar_by_depth;  // size 1 broadcasts over all depths
};

struct ScatteringConfig {
    double rate_mhz = 6.7;
    double saturation = 0.05;
    double excited_lifetime_ns = 26.2199247268;
    double antitrap_factor = -1.0;
    std::string emission_pattern = "dipole";
    double absorption_projection = 1.0;

    ScatteringParams to_params() const;
};

struct DynamicsConfig {
    double depth_mk = 10.49;
    double initial_nbar = 0.0;
    double total_time_us = 15.0;
    double bin_width_us = 1.0;
    std::size_t n_samples = 100000;
    std::size_t wigner_bins = 61;
    double wigner_range_sigma = 5.0;
    bool write_wigner = true;
};

struct FringeConfig {
    double visibility = -1.0;  // < 0: predict from depth/nbar via the budget
    double depth_mk = 10.49;
    double nbar = 0.08;
    double phase_offset_rad = 0.0;
    std::size_t n_points = 24;
    double mean_counts = 1000.0;
    double phase_noise_rms_mrad = 16.5;
    bool poisson = true;
};

struct ThermometryConfig {
    double nbar = 0.099;
    double omega_khz = 0.0;  // 0: use the axial frequency at dynamics.depth_mk
    double peak_width_khz = 6.0;
    double carrier_amp = 0.5;
    unsigned shots_per_point = 200;
};

struct LockConfig {
    PhaseLockModel model;
    double duration_s = 10.0;
};

struct Scenario {
    PhysicalConstants constants = PhysicalConstants::rb87_d2();
    double anchor_depth_mk = 10.49;
    double anchor_dp_hbark = 1.60;
    double anchor_axial_freq_khz = 0.0;  // 0: derive from the momentum anchor
    double anchor_radial_freq_khz = 300.0;
    ScanConfig scan;
    ScatteringConfig scattering;
    DynamicsConfig dynamics;
    FringeConfig fringe;
    ThermometryConfig thermometry;
    LockConfig lock;
    std::uint64_t seed = 20260819;
    int workers = 0;  // 0: hardware concurrency

    TrapModel trap_model() const;
    MotionalState motional_state(double depth_mk, double nbar) const;
    void validate() const;  // throws ValidationError listing every bad field
};

Scenario default_scenario();
Scenario scenario_from_json(const nlohmann::json& doc);
Scenario load_scenario_file(const std::filesystem::path& path);

// Fully resolved document (defaults expanded); reloading it reproduces the
// run bit for bit.
nlohmann::json scenario_to_json(const Scenario& s);

}  // namespace atomslit
