#pragma once

#include "tsf/bench/config.hpp"
#include "tsf/bench/report.hpp"
#include "tsf/bench/runner.hpp"
#include "tsf/ets.hpp"
#include "tsf/sarima.hpp"
#include "tsf/stats_tests.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace tsf::bench {

/// A pipeline stage failed; `stage()` names it and what() carries the cause.
class StageError : public std::runtime_error {
public:
    StageError(std::string stage, const std::string& cause, int exit_code);
    [[nodiscard]] const std::string& stage() const { return stage_; }
    /// CLI exit code of the underlying cause (1 config, 2 data, 3 numerical).
    [[nodiscard]] int exit_code() const { return exit_code_; }

private:
    std::string stage_;
    int exit_code_;
};

/// Loads the configured CSV. Throws DataError.
[[nodiscard]] TimeSeries ingest(const ExperimentConfig& config);

// Stage payloads as JSON text. Each is also written by run_pipeline.
[[nodiscard]] std::string ingest_json(const TimeSeries& series, const SplitData& split);
[[nodiscard]] std::string decomposition_json(const TimeSeries& series);
[[nodiscard]] std::string season_plot_json(const TimeSeries& series);
/// Mann-Kendall and Kruskal-Wallis on the full series; KPSS (short lag) on
/// training levels and first differences.
[[nodiscard]] std::string tests_json(const TimeSeries& full, const TimeSeries& train);

struct EtsAnalysis {
    ets::HoltWintersFit fit;
    stats::TestResult ljung_box;
    stats::TestResult lilliefors;
    stats::TestResult goldfeld_quandt;
    std::vector<double> forecast;
};

/// Fits Holt-Winters on the training part; residual diagnostics use lag 24.
[[nodiscard]] EtsAnalysis analyse_ets(const SplitData& split);
[[nodiscard]] std::string ets_json(const EtsAnalysis& analysis, const SplitData& split);

struct SarimaAnalysis {
    sarima::SarimaFit fit;
    /// Residuals aligned with the training months (zeros where undefined).
    std::vector<double> residuals;
    stats::TestResult ljung_box;
    stats::TestResult lilliefors;
    stats::TestResult goldfeld_quandt;
    /// Box-Pierce at lags 12, 24, ..., 72.
    std::vector<stats::TestResult> box_pierce;
    sarima::AcfPacf residual_acf;
    std::vector<double> forecast;
};

[[nodiscard]] SarimaAnalysis analyse_sarima(const SplitData& split, const sarima::SarimaOrder& order);
[[nodiscard]] std::string sarima_json(const SarimaAnalysis& analysis, const SplitData& split);
[[nodiscard]] std::string sarima_grid_json(const sarima::GridResult& grid);
[[nodiscard]] std::string sarima_grid_markdown(const sarima::GridResult& grid);
[[nodiscard]] std::string coefficient_markdown(const sarima::SarimaFit& fit);

/// Actual series plus per-model fitted and forecast traces (first successful
/// run and the across-run mean forecast).
[[nodiscard]] std::string forecast_plot_json(const RunReport& report, const SplitData& split);

[[nodiscard]] std::string grid_search_json(const GridSearchResult& result);

struct PipelineResult {
    RunReport report;
    std::vector<std::string> stages;
    std::vector<std::filesystem::path> artifacts;
};

/// Runs every stage in order (ingest, decompose, tests, ets, sarima, models,
/// report), writing artifacts under `out_dir`. On failure writes error.log and
/// throws StageError; earlier artifacts are kept.
PipelineResult run_pipeline(const ExperimentConfig& config, const std::filesystem::path& out_dir);

} // namespace tsf::bench
