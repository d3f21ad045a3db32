#include "atomslit/scenario.hpp"

#include "atomslit/errors.hpp"
#include "atomslit/io.hpp"

#include <cmath>
#include <sstream>

using nlohmann::json;

namespace atomslit {

ScatteringParams ScatteringConfig::to_params() const {
    ScatteringParams p;
    p.rate = rate_mhz * 1e6;
    p.saturation = saturation;
    p.excited_lifetime = excited_lifetime_ns * 1e-9;
    p.antitrap_factor = antitrap_factor;
    p.emission_pattern = emission_pattern_from_string(emission_pattern);
    p.absorption_projection = absorption_projection;
    return p;
}

TrapModel Scenario::trap_model() const {
    const double omega_radial = two_pi * anchor_radial_freq_khz * 1e3;
    if (anchor_axial_freq_khz > 0.0) {
        TrapModel m;
        m.depth_mk = anchor_depth_mk;
        m.anchor_depth_mk = anchor_depth_mk;
        m.anchor_omega_axial = two_pi * anchor_axial_freq_khz * 1e3;
        m.anchor_omega_radial = omega_radial;
        m.validate();
        return m;
    }
    return TrapModel::from_momentum_anchor(constants, anchor_depth_mk, anchor_dp_hbark,
                                           omega_radial);
}

MotionalState Scenario::motional_state(double depth_mk, double nbar) const {
    MotionalState state;
    state.omega = trap_frequencies(trap_model(), depth_mk).axial;
    state.nbar = nbar;
    state.mass = constants.mass;
    state.validate();
    return state;
}

Scenario default_scenario() {
    Scenario s;
    // Depth scan: geometric ladder between the published shallow and deep
    // operating points, with the occupations interpolated across it.
    s.scan.depths_mk = {0.60, 0.97, 1.56, 2.51, 4.04, 6.51, 10.49};
    s.scan.nbar_by_depth = {0.37, 0.32, 0.27, 0.23, 0.18, 0.13, 0.08};
    return s;
}

namespace {

void collect(std::vector<std::string>& errors, const std::string& path,
             const std::string& message) {
    errors.push_back(path + ": " + message);
}

void check_positive(std::vector<std::string>& errors, const std::string& path, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) collect(errors, path, "must be > 0");
}

void check_nonneg(std::vector<std::string>& errors, const std::string& path, double v) {
    if (v < 0.0 || !std::isfinite(v)) collect(errors, path, "must be >= 0");
}

// Merge the user document over the defaults, rejecting unknown keys and type
// mismatches with full field paths.
void merge(json& base, const json& user, const std::string& path,
           std::vector<std::string>& errors) {
    if (!user.is_object()) {
        collect(errors, path.empty() ? "(root)" : path, "must be a JSON object");
        return;
    }
    for (auto it = user.begin(); it != user.end(); ++it) {
        const std::string key = path.empty() ? it.key() : path + "." + it.key();
        if (!base.contains(it.key())) {
            collect(errors, key, "unknown key");
            continue;
        }
        json& slot = base[it.key()];
        const json& val = it.value();
        if (slot.is_object()) {
            merge(slot, val, key, errors);
        } else if (slot.is_array()) {
            if (!val.is_array()) {
                collect(errors, key, "must be an array of numbers");
                continue;
            }
            for (const auto& e : val)
                if (!e.is_number()) {
                    collect(errors, key, "must be an array of numbers");
                    break;
                }
            slot = val;
        } else if (slot.is_boolean()) {
            if (!val.is_boolean()) {
                collect(errors, key, "must be a boolean");
                continue;
            }
            slot = val;
        } else if (slot.is_string()) {
            if (!val.is_string()) {
                collect(errors, key, "must be a string");
                continue;
            }
            slot = val;
        } else {
            if (!val.is_number()) {
                collect(errors, key, "must be a number");
                continue;
            }
            slot = val;
        }
    }
}

}  // namespace

void Scenario::validate() const {
    std::vector<std::string> errors;

    if (!(constants.hbar > 0.0)) collect(errors, "constants.hbar", "must be > 0");
    if (!(constants.k_boltzmann > 0.0))
        collect(errors, "constants.k_boltzmann", "must be > 0");
    if (!(constants.mass > 0.0)) collect(errors, "constants.mass_kg", "must be > 0");
    if (!(constants.lambda_photon > 0.0))
        collect(errors, "constants.lambda_photon_nm", "must be > 0");
    if (!(constants.gamma_d2 > 0.0)) collect(errors, "constants.gamma_d2_mhz", "must be > 0");

    check_positive(errors, "trap.anchor_depth_mk", anchor_depth_mk);
    check_positive(errors, "trap.anchor_dp_hbark", anchor_dp_hbark);
    check_nonneg(errors, "trap.anchor_axial_freq_khz", anchor_axial_freq_khz);
    check_positive(errors, "trap.anchor_radial_freq_khz", anchor_radial_freq_khz);

    if (scan.depths_mk.empty()) collect(errors, "scan.depths_mk", "must not be empty");
    for (std::size_t i = 0; i < scan.depths_mk.size(); ++i)
        if (!(scan.depths_mk[i] > 0.0))
            collect(errors, "scan.depths_mk[" + std::to_string(i) + "]", "must be > 0");
    if (scan.nbar_by_depth.size() != 1 &&
        scan.nbar_by_depth.size() != scan.depths_mk.size())
        collect(errors, "scan.nbar_by_depth",
                "must have size 1 or match scan.depths_mk");
    for (std::size_t i = 0; i < scan.nbar_by_depth.size(); ++i)
        if (scan.nbar_by_depth[i] < 0.0)
            collect(errors, "scan.nbar_by_depth[" + std::to_string(i) + "]",
                    "must be >= 0");

    check_positive(errors, "scattering.rate_mhz", scattering.rate_mhz);
    if (scattering.saturation < 0.0 || scattering.saturation > 1.0)
        collect(errors, "scattering.saturation", "must be in [0, 1]");
    check_positive(errors, "scattering.excited_lifetime_ns",
                   scattering.excited_lifetime_ns);
    if (!std::isfinite(scattering.antitrap_factor) ||
        std::fabs(scattering.antitrap_factor) > 100.0)
        collect(errors, "scattering.antitrap_factor", "must be finite and |f| <= 100");
    try {
        emission_pattern_from_string(scattering.emission_pattern);
    } catch (const std::domain_error&) {
        collect(errors, "scattering.emission_pattern",
                "must be one of isotropic, dipole, axial_only");
    }
    if (std::fabs(scattering.absorption_projection) > 1.0 ||
        !std::isfinite(scattering.absorption_projection))
        collect(errors, "scattering.absorption_projection", "must be in [-1, 1]");

    check_positive(errors, "dynamics.depth_mk", dynamics.depth_mk);
    check_nonneg(errors, "dynamics.initial_nbar", dynamics.initial_nbar);
    check_positive(errors, "dynamics.total_time_us", dynamics.total_time_us);
    check_positive(errors, "dynamics.bin_width_us", dynamics.bin_width_us);
    if (dynamics.bin_width_us > 0.0 && dynamics.total_time_us > 0.0) {
        const double bins = dynamics.total_time_us / dynamics.bin_width_us;
        if (std::fabs(bins - std::round(bins)) > 1e-9 * bins || bins < 1.0)
            collect(errors, "dynamics.bin_width_us", "must divide dynamics.total_time_us");
    }
    if (dynamics.n_samples < 1000)
        collect(errors, "dynamics.n_samples", "must be >= 1000");
    if (dynamics.wigner_bins < 8 || dynamics.wigner_bins > 1024)
        collect(errors, "dynamics.wigner_bins", "must be in [8, 1024]");
    check_positive(errors, "dynamics.wigner_range_sigma", dynamics.wigner_range_sigma);

    if (fringe.visibility > 1.0)
        collect(errors, "fringe.visibility", "must be <= 1 (or < 0 for auto)");
    check_positive(errors, "fringe.depth_mk", fringe.depth_mk);
    check_nonneg(errors, "fringe.nbar", fringe.nbar);
    if (!std::isfinite(fringe.phase_offset_rad))
        collect(errors, "fringe.phase_offset_rad", "must be finite");
    if (fringe.n_points < 4) collect(errors, "fringe.n_points", "must be >= 4");
    if (!(fringe.mean_counts >= 1.0))
        collect(errors, "fringe.mean_counts", "must be >= 1");
    check_nonneg(errors, "fringe.phase_noise_rms_mrad", fringe.phase_noise_rms_mrad);

    check_nonneg(errors, "thermometry.nbar", thermometry.nbar);
    check_nonneg(errors, "thermometry.omega_khz", thermometry.omega_khz);
    check_positive(errors, "thermometry.peak_width_khz", thermometry.peak_width_khz);
    if (thermometry.carrier_amp < 0.0 || thermometry.carrier_amp > 1.0)
        collect(errors, "thermometry.carrier_amp", "must be in [0, 1]");

    try {
        lock.model.validate();
    } catch (const ValidationError& e) {
        errors.emplace_back(e.what());
    }
    check_positive(errors, "lock.duration_s", lock.duration_s);

    if (workers < 0) collect(errors, "workers", "must be >= 0");

    if (!errors.empty()) {
        std::ostringstream msg;
        msg << "invalid scenario (" << errors.size() << " problem"
            << (errors.size() == 1 ? "" : "s") << "):";
        for (const auto& e : errors) msg << "\n  " << e;
        throw ValidationError(msg.str());
    }
}

json scenario_to_json(const Scenario& s) {
    json j;
    j["seed"] = s.seed;
    j["workers"] = s.workers;
    j["constants"] = {
        {"hbar", s.constants.hbar},
        {"k_boltzmann", s.constants.k_boltzmann},
        {"mass_kg", s.constants.mass},
        {"lambda_photon_nm", s.constants.lambda_photon * 1e9},
        {"gamma_d2_mhz", s.constants.gamma_d2 / (two_pi * 1e6)},
    };
    j["trap"] = {
        {"anchor_depth_mk", s.anchor_depth_mk},
        {"anchor_dp_hbark", s.anchor_dp_hbark},
        {"anchor_axial_freq_khz", s.anchor_axial_freq_khz},
        {"anchor_radial_freq_khz", s.anchor_radial_freq_khz},
    };
    j["scan"] = {
        {"depths_mk", s.scan.depths_mk},
        {"nbar_by_depth", s.scan.nbar_by_depth},
    };
    j["scattering"] = {
        {"rate_mhz", s.scattering.rate_mhz},
        {"saturation", s.scattering.saturation},
        {"excited_lifetime_ns", s.scattering.excited_lifetime_ns},
        {"antitrap_factor", s.scattering.antitrap_factor},
        {"emission_pattern", s.scattering.emission_pattern},
        {"absorption_projection", s.scattering.absorption_projection},
    };
    j["dynamics"] = {
        {"depth_mk", s.dynamics.depth_mk},
        {"initial_nbar", s.dynamics.initial_nbar},
        {"total_time_us", s.dynamics.total_time_us},
        {"bin_width_us", s.dynamics.bin_width_us},
        {"n_samples", s.dynamics.n_samples},
        {"wigner_bins", s.dynamics.wigner_bins},
        {"wigner_range_sigma", s.dynamics.wigner_range_sigma},
        {"write_wigner", s.dynamics.write_wigner},
    };
    j["fringe"] = {
        {"visibility", s.fringe.visibility},
        {"depth_mk", s.fringe.depth_mk},
        {"nbar", s.fringe.nbar},
        {"phase_offset_rad", s.fringe.phase_offset_rad},
        {"n_points", s.fringe.n_points},
        {"mean_counts", s.fringe.mean_counts},
        {"phase_noise_rms_mrad", s.fringe.phase_noise_rms_mrad},
        {"poisson", s.fringe.poisson},
    };
    j["thermometry"] = {
        {"nbar", s.thermometry.nbar},
        {"omega_khz", s.thermometry.omega_khz},
        {"peak_width_khz", s.thermometry.peak_width_khz},
        {"carrier_amp", s.thermometry.carrier_amp},
        {"shots_per_point", s.thermometry.shots_per_point},
    };
    j["lock"] = {
        {"residual_rms_mrad", s.lock.model.residual_rms * 1e3},
        {"beat_frequency_khz", s.lock.model.beat_frequency / 1e3},
        {"actuator_range_rad", s.lock.model.actuator_range},
        {"drift_rate", s.lock.model.drift_rate},
        {"servo_bandwidth_hz", s.lock.model.servo_bandwidth},
        {"thermal_amp_rad", s.lock.model.thermal_amp},
        {"thermal_freq_hz", s.lock.model.thermal_freq},
        {"duration_s", s.lock.duration_s},
    };
    return j;
}

Scenario scenario_from_json(const json& doc) {
    json base = scenario_to_json(default_scenario());
    std::vector<std::string> errors;
    merge(base, doc, "", errors);
    if (!errors.empty()) {
        std::ostringstream msg;
        msg << "invalid scenario (" << errors.size() << " problem"
            << (errors.size() == 1 ? "" : "s") << "):";
        for (const auto& e : errors) msg << "\n  " << e;
        throw ValidationError(msg.str());
    }

    Scenario s;
    s.seed = base["seed"].get<std::uint64_t>();
    s.workers = base["workers"].get<int>();
    const json& c = base["constants"];
    s.constants.hbar = c["hbar"].get<double>();
    s.constants.k_boltzmann = c["k_boltzmann"].get<double>();
    s.constants.mass = c["mass_kg"].get<double>();
    s.constants.lambda_photon = c["lambda_photon_nm"].get<double>() * 1e-9;
    s.constants.gamma_d2 = c["gamma_d2_mhz"].get<double>() * two_pi * 1e6;
    const json& t = base["trap"];
    s.anchor_depth_mk = t["anchor_depth_mk"].get<double>();
    s.anchor_dp_hbark = t["anchor_dp_hbark"].get<double>();
    s.anchor_axial_freq_khz = t["anchor_axial_freq_khz"].get<double>();
    s.anchor_radial_freq_khz = t["anchor_radial_freq_khz"].get<double>();
    const json& sc = base["scan"];
    s.scan.depths_mk = sc["depths_mk"].get<std::vector<double>>();
    s.scan.nbar_by_depth = sc["nbar_by_depth"].get<std::vector<double>>();
    const json& sg = base["scattering"];
    s.scattering.rate_mhz = sg["rate_mhz"].get<double>();
    s.scattering.saturation = sg["saturation"].get<double>();
    s.scattering.excited_lifetime_ns = sg["excited_lifetime_ns"].get<double>();
    s.scattering.antitrap_factor = sg["antitrap_factor"].get<double>();
    s.scattering.emission_pattern = sg["emission_pattern"].get<std::string>();
    s.scattering.absorption_projection = sg["absorption_projection"].get<double>();
    const json& d = base["dynamics"];
    s.dynamics.depth_mk = d["depth_mk"].get<double>();
    s.dynamics.initial_nbar = d["initial_nbar"].get<double>();
    s.dynamics.total_time_us = d["total_time_us"].get<double>();
    s.dynamics.bin_width_us = d["bin_width_us"].get<double>();
    s.dynamics.n_samples = d["n_samples"].get<std::size_t>();
    s.dynamics.wigner_bins = d["wigner_bins"].get<std::size_t>();
    s.dynamics.wigner_range_sigma = d["wigner_range_sigma"].get<double>();
    s.dynamics.write_wigner = d["write_wigner"].get<bool>();
    const json& fr = base["fringe"];
    s.fringe.visibility = fr["visibility"].get<double>();
    s.fringe.depth_mk = fr["depth_mk"].get<double>();
    s.fringe.nbar = fr["nbar"].get<double>();
    s.fringe.phase_offset_rad = fr["phase_offset_rad"].get<double>();
    s.fringe.n_points = fr["n_points"].get<std::size_t>();
    s.fringe.mean_counts = fr["mean_counts"].get<double>();
    s.fringe.phase_noise_rms_mrad = fr["phase_noise_rms_mrad"].get<double>();
    s.fringe.poisson = fr["poisson"].get<bool>();
    const json& th = base["thermometry"];
    s.thermometry.nbar = th["nbar"].get<double>();
    s.thermometry.omega_khz = th["omega_khz"].get<double>();
    s.thermometry.peak_width_khz = th["peak_width_khz"].get<double>();
    s.thermometry.carrier_amp = th["carrier_amp"].get<double>();
    s.thermometry.shots_per_point = th["shots_per_point"].get<unsigned>();
    const json& lk = base["lock"];
    s.lock.model.residual_rms = lk["residual_rms_mrad"].get<double>() * 1e-3;
    s.lock.model.beat_frequency = lk["beat_frequency_khz"].get<double>() * 1e3;
    s.lock.model.actuator_range = lk["actuator_range_rad"].get<double>();
    s.lock.model.drift_rate = lk["drift_rate"].get<double>();
    s.lock.model.servo_bandwidth = lk["servo_bandwidth_hz"].get<double>();
    s.lock.model.thermal_amp = lk["thermal_amp_rad"].get<double>();
    s.lock.model.thermal_freq = lk["thermal_freq_hz"].get<double>();
    s.lock.duration_s = lk["duration_s"].get<double>();

    s.validate();
    return s;
}

Scenario load_scenario_file(const std::filesystem::path& path) {
    const std::string text = io::read_text_file(path);
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
    return scenario_from_json(doc);
}

}  // namespace atomslit
