#pragma once

#include "tsf/bench/config.hpp"
#include "tsf/metrics.hpp"
#include "tsf/nn/presets.hpp"
#include "tsf/series.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tsf::bench {

/// Train/test partition plus the scaler fitted on the training part.
struct SplitData {
    TimeSeries train;
    TimeSeries test;
    MinMaxScaler scaler;
};

/// Splits after `train_end` and keeps `horizon` test months. Throws DataError
/// when fewer than `horizon` months follow the boundary.
[[nodiscard]] SplitData prepare_split(const TimeSeries& full, YearMonth train_end, int horizon);

inline constexpr const char* kMetricNames[4] = {"mse", "mae", "gmrae", "theil_u1"};

/// "<split>.<scale>.<metric>", e.g. "test.normalized.mse".
[[nodiscard]] std::string metric_key(const std::string& split, metrics::Scale scale, const std::string& metric);

struct RunRecord {
    std::uint64_t seed = 0;
    bool ok = true;
    std::string failure;
    int epochs = 0;
    int best_epoch = 0;
    std::optional<double> final_train_loss;
    std::optional<double> final_val_loss;
    std::map<std::string, double> metrics;
    /// GMRAE floored-term counts under the matching metric key.
    std::map<std::string, std::size_t> gmrae_floored;
    /// Original-scale forecasts of the test months.
    std::vector<double> test_forecast;
    /// Original-scale one-step fitted values for training months, starting at `fitted_offset`.
    std::vector<double> train_fitted;
    std::size_t fitted_offset = 0;
};

struct MetricSummary {
    double mean = 0.0;
    /// Sample sd / sqrt(n); absent when n = 1.
    std::optional<double> se;
    std::size_t n = 0;
};

/// Mean and standard error of successful runs' values.
[[nodiscard]] MetricSummary summarize(std::span<const double> values);

struct ModelResult {
    std::string name;
    std::string family;
    std::map<std::string, std::string> metadata;
    std::vector<RunRecord> runs;
    std::map<std::string, MetricSummary> summary;
    std::size_t failures = 0;
};

/// Fills `summary` from the successful runs.
void aggregate(ModelResult& result);

using RunFn = std::function<RunRecord(std::uint64_t seed)>;

/// Run i uses seed base_seed + i. Exceptions mark that run failed; results are
/// returned in run order regardless of `workers`.
[[nodiscard]] std::vector<RunRecord> repeated_runs(const RunFn& fn, int n_runs, std::uint64_t base_seed,
                                                   unsigned workers = 1);

/// Scores original-scale train and test predictions on every requested scale.
void score(RunRecord& rec, const SplitData& split, std::span<const double> train_actual,
           std::span<const double> train_pred, std::span<const double> test_pred,
           const std::vector<metrics::Scale>& scales);

/// One run of each model family. Neural runs train with `seed`.
[[nodiscard]] RunRecord run_neural(const SplitData& split, const ModelEntry& entry, std::size_t window_len,
                                   Evaluation evaluation, const std::vector<metrics::Scale>& scales, std::uint64_t seed);
[[nodiscard]] RunRecord run_ets(const SplitData& split, const std::vector<metrics::Scale>& scales);
[[nodiscard]] RunRecord run_arima(const SplitData& split, const sarima::SarimaOrder& order,
                                  const std::vector<metrics::Scale>& scales);
[[nodiscard]] RunRecord run_seasonal_naive(const SplitData& split, const std::vector<metrics::Scale>& scales);

/// Recursive (own predictions appended) or teacher-forced multi-step forecasts on the scaled axis.
[[nodiscard]] std::vector<double> neural_forecast(nn::SequenceRegressor& model, std::span<const double> history,
                                                  std::span<const double> future_actual, int horizon, Evaluation evaluation);

struct GridSearchSpec {
    std::vector<std::size_t> units;
    std::vector<nn::Activation> activations;
    std::vector<double> learning_rates;
    std::vector<nn::OptimizerKind> optimizers;
    std::vector<int> batch_sizes;

    /// The full tuning grid of the study.
    [[nodiscard]] static GridSearchSpec paper();
    [[nodiscard]] std::size_t size() const;
};

struct Trial {
    /// Position in the deterministic Cartesian enumeration
    /// (units, activation, learning rate, optimizer, batch size; last varies fastest).
    std::size_t index = 0;
    std::size_t units = 0;
    nn::Activation activation = nn::Activation::tanh;
    double learning_rate = 0.0;
    nn::OptimizerKind optimizer = nn::OptimizerKind::adam;
    int batch_size = 0;
    std::size_t parameter_count = 0;
    double val_mse = 0.0;
    bool ok = true;
    std::string failure;
};

struct GridSearchResult {
    /// Successful trials, ascending validation MSE; ties by fewer parameters then index.
    std::vector<Trial> trials;
    std::vector<Trial> failures;
    [[nodiscard]] const Trial& best() const { return trials.at(0); }
};

/// Trains every combination once with `seed` on top of `base` (units apply to
/// recurrent kinds and to the transformer's embedding width).
[[nodiscard]] GridSearchResult grid_search_nn(const nn::ModelPreset& base, const GridSearchSpec& spec,
                                              const WindowedDataset& data, std::uint64_t seed, unsigned workers = 1);

} // namespace tsf::bench
