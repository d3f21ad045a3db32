#include "atomslit/cli.hpp"

#include "atomslit/dynamics.hpp"
#include "atomslit/ensemble.hpp"
#include "atomslit/errors.hpp"
#include "atomslit/fringes.hpp"
#include "atomslit/io.hpp"
#include "atomslit/recoil.hpp"
#include "atomslit/rng.hpp"
#include "atomslit/thermometry.hpp"
#include "atomslit/version.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>

using nlohmann::json;

namespace atomslit::cli {

namespace {

namespace fs = std::filesystem;

// Shared tail of every command: resolved scenario, then a manifest hashing
// every file the run produced.
std::vector<std::string> finish_run(const std::string& command, const Scenario& s,
                                    const fs::path& out_dir,
                                    std::vector<std::string> files,
                                    const std::string& started) {
    const std::string resolved = scenario_to_json(s).dump(2) + "\n";
    io::write_text_file(out_dir / "resolved_scenario.json", resolved);
    files.push_back("resolved_scenario.json");

    io::RunManifest m;
    m.command = command;
    m.scenario_hash = io::hex64(io::fnv1a64(resolved));
    m.tool_version = tool_version;
    m.started_utc = started;
    m.finished_utc = io::utc_timestamp();
    for (const auto& name : files)
        m.outputs.emplace_back(name,
                               io::hex64(io::fnv1a64(io::read_text_file(out_dir / name))));
    io::write_manifest(out_dir / "run_manifest.json", m);
    files.push_back("run_manifest.json");
    return files;
}

void ensure_out_dir(const fs::path& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec && !fs::is_directory(out_dir))
        throw ValidationError("cannot create output directory: " + out_dir.string());
}

}  // namespace

std::vector<std::string> run_visibility_scan(const Scenario& s, const fs::path& out_dir) {
    s.validate();
    ensure_out_dir(out_dir);
    const std::string started = io::utc_timestamp();

    const TrapModel trap = s.trap_model();
    const double hbar_k = s.constants.recoil_momentum();
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < s.scan.depths_mk.size(); ++i) {
        const double depth = s.scan.depths_mk[i];
        const double nbar = s.scan.nbar_by_depth.size() == 1 ? s.scan.nbar_by_depth[0]
                                                             : s.scan.nbar_by_depth[i];
        const TrapFrequencies f = trap_frequencies(trap, depth);
        MotionalState ground{f.axial, 0.0, s.constants.mass};
        const double dp = ground.sigma_p(s.constants);
        const double eta = recoil_eta(s.constants, dp);
        const double eta_eff = recoil_eta_eff(eta, nbar);
        rows.push_back({depth, f.axial / (two_pi * 1e3), dp / hbar_k, eta, nbar,
                        visibility(eta), visibility(eta_eff)});
    }
    io::write_csv(out_dir / "visibility_scan.csv",
                  {"depth_mk", "omega_ax_khz", "dp_hbark", "eta", "nbar", "v_ideal",
                   "v_thermal"},
                  rows);
    return finish_run("visibility-scan", s, out_dir, {"visibility_scan.csv"}, started);
}

std::vector<std::string> run_dynamics(const Scenario& s, const fs::path& out_dir) {
    s.validate();
    ensure_out_dir(out_dir);
    const std::string started = io::utc_timestamp();

    const TrapModel anchor = s.trap_model();
    TrapModel trap = anchor;
    trap.depth_mk = s.dynamics.depth_mk;
    const MotionalState state =
        s.motional_state(s.dynamics.depth_mk, s.dynamics.initial_nbar);
    const double total_time = s.dynamics.total_time_us * 1e-6;
    const double bin_width = s.dynamics.bin_width_us * 1e-6;
    const ScatteringParams scat = s.scattering.to_params();

    const auto centers =
        bin_center_ensembles(s.constants, state, trap, scat, total_time, bin_width,
                             s.dynamics.n_samples, s.seed, s.workers);
    const double k_axial = s.constants.photon_wavenumber();
    const double hbar_k = s.constants.recoil_momentum();

    std::vector<std::string> files;
    std::vector<std::vector<double>> rows;
    for (std::size_t b = 0; b < centers.size(); ++b) {
        const auto est = visibility_estimator(centers[b], k_axial);
        const double t0 = s.dynamics.bin_width_us * static_cast<double>(b);
        rows.push_back({t0, t0 + s.dynamics.bin_width_us, est.visibility, est.stderror,
                        nbar_estimate(s.constants, centers[b])});
    }
    io::write_csv(out_dir / "visibility_series.csv",
                  {"t_start_us", "t_end_us", "visibility", "stderr", "nbar"}, rows);
    files.push_back("visibility_series.csv");

    if (s.dynamics.write_wigner) {
        for (std::size_t b = 0; b < centers.size(); ++b) {
            const auto& ens = centers[b];
            double xx = 0.0, pp = 0.0;
            for (const auto& sm : ens.samples) {
                xx += sm.x * sm.x;
                pp += sm.p * sm.p;
            }
            xx = std::sqrt(xx / static_cast<double>(ens.samples.size()));
            pp = std::sqrt(pp / static_cast<double>(ens.samples.size()));
            const double xr = s.dynamics.wigner_range_sigma * xx;
            const double pr = s.dynamics.wigner_range_sigma * pp;
            const WignerGrid grid = wigner_histogram(ens, -xr, xr, -pr, pr,
                                                     s.dynamics.wigner_bins,
                                                     s.dynamics.wigner_bins);
            std::vector<std::vector<double>> wrows;
            wrows.reserve(grid.nx() * grid.np());
            for (std::size_t ix = 0; ix < grid.nx(); ++ix)
                for (std::size_t ip = 0; ip < grid.np(); ++ip)
                    wrows.push_back({grid.x_center(ix) * 1e6, grid.p_center(ip) / hbar_k,
                                     grid.density[ix * grid.np() + ip]});
            char name[32];
            std::snprintf(name, sizeof(name), "wigner_bin_%02zu.csv", b);
            io::write_csv(out_dir / name, {"x_um", "p_hbark", "density"}, wrows);
            files.emplace_back(name);
        }
    }
    return finish_run("dynamics", s, out_dir, std::move(files), started);
}

std::vector<std::string> run_thermometry(const Scenario& s,
                                         const std::optional<fs::path>& input,
                                         const fs::path& out_dir) {
    s.validate();
    ensure_out_dir(out_dir);
    const std::string started = io::utc_timestamp();

    SidebandSpectrum spectrum;
    if (input) {
        spectrum = read_spectrum_csv(*input);
    } else {
        double omega = two_pi * s.thermometry.omega_khz * 1e3;
        if (omega <= 0.0)
            omega = trap_frequencies(s.trap_model(), s.dynamics.depth_mk).axial;
        spectrum = synthesize_spectrum(
            s.thermometry.nbar, omega, two_pi * s.thermometry.peak_width_khz * 1e3,
            s.thermometry.carrier_amp, s.thermometry.shots_per_point,
            RandomStream::derive_seed(s.seed, 0x7e50), 0);
    }
    write_spectrum_csv(out_dir / "spectrum.csv", spectrum);

    const ThermometryFit fit = fit_sidebands(spectrum);
    json j;
    j["nbar"] = fit.nbar;
    j["nbar_err_lo"] = fit.nbar_err_lo;
    j["nbar_err_hi"] = fit.nbar_err_hi;
    j["p0"] = fit.p0;
    j["p0_err_lo"] = fit.p0_err_lo;
    j["p0_err_hi"] = fit.p0_err_hi;
    j["red_amp"] = fit.red_amp;
    j["blue_amp"] = fit.blue_amp;
    j["carrier_amp"] = fit.carrier_amp;
    j["ratio"] = fit.ratio;
    j["splitting_khz"] = fit.sideband_splitting / (two_pi * 1e3);
    j["width_khz"] = fit.width / (two_pi * 1e3);
    j["chi2"] = fit.chi2;
    j["ndof"] = fit.ndof;
    j["assumes_thermal_state"] = fit.assumes_thermal_state;
    j["assumes_resolved_sidebands"] = fit.assumes_resolved_sidebands;
    io::write_text_file(out_dir / "thermometry_fit.json", j.dump(2) + "\n");

    return finish_run("thermometry", s, out_dir, {"spectrum.csv", "thermometry_fit.json"},
                      started);
}

std::vector<std::string> run_fringe(const Scenario& s,
                                    const std::optional<fs::path>& input,
                                    std::size_t bootstrap_replicates,
                                    const fs::path& out_dir) {
    s.validate();
    ensure_out_dir(out_dir);
    const std::string started = io::utc_timestamp();

    FringeDataset data;
    if (input) {
        data = read_fringe_csv(*input);
    } else {
        double v = s.fringe.visibility;
        if (v < 0.0) {
            // Predict the operating visibility from the configured trap depth
            // and occupation through the visibility budget.
            const MotionalState ground = s.motional_state(s.fringe.depth_mk, 0.0);
            const double eta = recoil_eta(s.constants, ground.sigma_p(s.constants));
            v = visibility_budget(visibility(eta), s.fringe.nbar,
                                  s.fringe.phase_noise_rms_mrad * 1e-3);
        }
        data = synthesize_fringe(v, s.fringe.phase_offset_rad, s.fringe.n_points,
                                 s.fringe.mean_counts,
                                 s.fringe.phase_noise_rms_mrad * 1e-3,
                                 RandomStream::derive_seed(s.seed, 0xf21e),
                                 s.fringe.poisson);
        data.meta.depth_mk = s.fringe.depth_mk;
    }
    write_fringe_csv(out_dir / "fringe.csv", data);

    const FringeFit fit = fit_fringe(data);
    json j;
    j["visibility"] = fit.visibility;
    j["visibility_err"] = fit.visibility_err;
    j["phase_offset"] = fit.phase_offset;
    j["phase_offset_err"] = fit.phase_offset_err;
    j["baseline"] = fit.baseline;
    j["baseline_err"] = fit.baseline_err;
    j["chi2"] = fit.chi2;
    j["ndof"] = fit.ndof;
    j["dropped_points"] = fit.dropped_points;
    if (bootstrap_replicates > 0) {
        const BootstrapResult bs =
            bootstrap_fringe(data, bootstrap_replicates,
                             RandomStream::derive_seed(s.seed, 0xb0a7));
        j["bootstrap_visibility_mean"] = bs.visibility_mean;
        j["bootstrap_visibility_std"] = bs.visibility_std;
        j["bootstrap_replicates"] = bs.replicates;
    }
    io::write_text_file(out_dir / "fringe_fit.json", j.dump(2) + "\n");

    return finish_run("fringe", s, out_dir, {"fringe.csv", "fringe_fit.json"}, started);
}

std::vector<std::string> run_lock_sim(const Scenario& s, const fs::path& out_dir) {
    s.validate();
    ensure_out_dir(out_dir);
    const std::string started = io::utc_timestamp();

    const std::uint64_t sim_seed = RandomStream::derive_seed(s.seed, 0x10c4);
    const LockSimResult closed =
        lock_residual_simulation(s.lock.model, s.lock.duration_s, sim_seed);
    PhaseLockModel open_model = s.lock.model;
    open_model.servo_bandwidth = 0.0;
    const LockSimResult open =
        lock_residual_simulation(open_model, s.lock.duration_s, sim_seed);

    write_phase_trace_csv(out_dir / "phase_trace.csv", closed);
    json j;
    j["rms_closed_mrad"] = closed.rms * 1e3;
    j["rms_open_mrad"] = open.rms * 1e3;
    j["locked"] = closed.locked;
    j["target_rms_mrad"] = s.lock.model.residual_rms * 1e3;
    j["meets_target"] = closed.rms <= 1.5 * s.lock.model.residual_rms;
    io::write_text_file(out_dir / "lock_summary.json", j.dump(2) + "\n");

    return finish_run("lock-sim", s, out_dir, {"phase_trace.csv", "lock_summary.json"},
                      started);
}

}  // namespace atomslit::cli
