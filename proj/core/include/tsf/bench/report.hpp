#pragma once

#include "tsf/bench/config.hpp"
#include "tsf/bench/runner.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace tsf::bench {

struct RunReport {
    ExperimentConfig config;
    YearMonth test_start;
    std::vector<double> test_actual;
    std::vector<ModelResult> models;
};

/// Deterministic JSON (sorted keys, shortest round-trip numbers, no timing or
/// host information). report_to_json(report_from_json(s)) == s.
[[nodiscard]] std::string report_to_json(const RunReport& report);
[[nodiscard]] RunReport report_from_json(const std::string& text);

/// Comparison tables, one per (split, scale), one row per model with mean ± SE.
[[nodiscard]] std::string report_to_markdown(const RunReport& report);

/// Compiler, build and host details plus a UTC timestamp, kept apart from the report.
[[nodiscard]] std::string environment_stamp_json();

/// Writes text to a file, creating parent directories. Throws std::runtime_error if unwritable.
void write_text(const std::filesystem::path& path, const std::string& text);
[[nodiscard]] std::string read_text(const std::filesystem::path& path);

/// Formats `mean ± se` for tables (se omitted when absent).
[[nodiscard]] std::string format_mean_se(double mean, const std::optional<double>& se);

} // namespace tsf::bench
