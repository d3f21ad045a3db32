#pragma once

#include "atomslit/scenario.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace atomslit::cli {

// Each command computes its products, writes them into out_dir together with
// the resolved scenario and a run manifest, and returns the file names it
// wrote. Errors surface as ValidationError / FitError; the binary maps them
// to exit codes 2 and 3.

std::vector<std::string> run_visibility_scan(const Scenario& s,
                                             const std::filesystem::path& out_dir);

std::vector<std::string> run_dynamics(const Scenario& s,
                                      const std::filesystem::path& out_dir);

std::vector<std::string> run_thermometry(const Scenario& s,
                                         const std::optional<std::filesystem::path>& input,
                                         const std::filesystem::path& out_dir);

std::vector<std::string> run_fringe(const Scenario& s,
                                    const std::optional<std::filesystem::path>& input,
                                    std::size_t bootstrap_replicates,
                                    const std::filesystem::path& out_dir);

std::vector<std::string> run_lock_sim(const Scenario& s,
                                      const std::filesystem::path& out_dir);

}  // namespace atomslit::cli
