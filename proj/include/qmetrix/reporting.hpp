#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qmetrix/entanglement.hpp"
#include "qmetrix/gm_sampler.hpp"

namespace qmetrix {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

/// CSV with a versioned schema. On disk the first line is "# schema: <name>",
/// followed by optional "# key=value" metadata lines, a header and the rows.
struct CsvTable {
    std::string schema;
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(std::string_view name) const;
    std::string meta_value(std::string_view key) const;
};

void write_csv(const std::filesystem::path& path, const CsvTable& table);
std::string to_csv_string(const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

struct RunManifest {
    std::string command;
    nlohmann::json config;
    std::vector<std::uint64_t> seeds;
    std::string version;
    double wall_seconds = 0.0;
    std::map<std::string, std::string> output_digests;

    void add_output(const std::filesystem::path& path);
    nlohmann::json to_json() const;
};

/// Writes <output>.manifest.json next to the first output.
std::filesystem::path write_manifest(const RunManifest& manifest, const std::filesystem::path& primary_output);

/// "lo:step:hi" (inclusive; hi is appended if the steps miss it) or a
/// comma-separated list.
std::vector<double> parse_grid(std::string_view text);

struct SvgSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// Minimal line chart with axes, tick labels and a legend.
void write_svg_chart(const std::filesystem::path& path, std::string_view title, std::string_view x_label,
                     std::string_view y_label, const std::vector<SvgSeries>& series);

/// Analytic law table: measure, value, q_opt, stddev.
CsvTable law_table(Measure measure, std::span<const double> values, int local_dim, bool unequal_d3);

/// Sampler output: k, gm_lo, gm_hi, count, q_max, stddev. The config is kept
/// in the metadata lines so a file can be compared later.
CsvTable sampler_table(const SampleReport& report);
SampleReport sampler_report_from_table(const CsvTable& table);

}  // namespace qmetrix
