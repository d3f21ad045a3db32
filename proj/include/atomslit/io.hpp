#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace atomslit::io {

// Shortest round-trip-safe decimal form used in every CSV we write, so reruns
// of an identical scenario produce byte-identical files.
std::string format_double(double v);

void write_text_file(const std::filesystem::path& path, std::string_view content);
std::string read_text_file(const std::filesystem::path& path);

// Numeric CSV with a single header row. Readers ignore blank lines and
// require every row to match the header width.
void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};
CsvTable read_csv(const std::filesystem::path& path);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

// Provenance record written next to every CLI product: hash of the resolved
// scenario, tool version, wall-clock bounds, and a hash per output file.
struct RunManifest {
    std::string command;
    std::string scenario_hash;
    std::string tool_version;
    std::string started_utc;
    std::string finished_utc;
    std::vector<std::pair<std::string, std::string>> outputs;  // name, fnv1a64
};

void write_manifest(const std::filesystem::path& path, const RunManifest& m);
std::string utc_timestamp();

}  // namespace atomslit::io
