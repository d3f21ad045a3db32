#include "atomslit/io.hpp"

#include "atomslit/errors.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

namespace atomslit::io {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot open for writing: " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw ValidationError("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open for reading: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::string out;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c) out += ',';
        out += header[c];
    }
    out += '\n';
    for (const auto& row : rows) {
        if (row.size() != header.size())
            throw ValidationError("csv row width does not match header: " + path.string());
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            out += format_double(row[c]);
        }
        out += '\n';
    }
    write_text_file(path, out);
}

CsvTable read_csv(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    CsvTable table;
    std::istringstream lines(text);
    std::string line;
    bool have_header = false;
    std::size_t lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!have_header) {
            table.header = cells;
            have_header = true;
            continue;
        }
        if (cells.size() != table.header.size())
            throw ValidationError(path.string() + ":" + std::to_string(lineno) +
                                  ": expected " + std::to_string(table.header.size()) +
                                  " columns, got " + std::to_string(cells.size()));
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells) {
            std::size_t used = 0;
            double v = 0;
            try {
                v = std::stod(c, &used);
            } catch (const std::exception&) {
                throw ValidationError(path.string() + ":" + std::to_string(lineno) +
                                      ": not a number: '" + c + "'");
            }
            if (used != c.size())
                throw ValidationError(path.string() + ":" + std::to_string(lineno) +
                                      ": trailing junk in cell: '" + c + "'");
            row.push_back(v);
        }
        table.rows.push_back(std::move(row));
    }
    if (!have_header) throw ValidationError("empty csv: " + path.string());
    return table;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string utc_timestamp() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_manifest(const std::filesystem::path& path, const RunManifest& m) {
    std::string out = "{\n";
    auto field = [&out](const std::string& key, const std::string& value, bool comma) {
        out += "  \"" + key + "\": \"" + value + "\"";
        out += comma ? ",\n" : "\n";
    };
    field("command", m.command, true);
    field("scenario_hash", m.scenario_hash, true);
    field("tool_version", m.tool_version, true);
    field("started_utc", m.started_utc, true);
    field("finished_utc", m.finished_utc, true);
    out += "  \"outputs\": {\n";
    for (std::size_t i = 0; i < m.outputs.size(); ++i) {
        out += "    \"" + m.outputs[i].first + "\": \"" + m.outputs[i].second + "\"";
        out += (i + 1 < m.outputs.size()) ? ",\n" : "\n";
    }
    out += "  }\n}\n";
    write_text_file(path, out);
}

}  // namespace atomslit::io
