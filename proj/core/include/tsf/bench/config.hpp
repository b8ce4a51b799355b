#pragma once

#include "tsf/metrics.hpp"
#include "tsf/nn/presets.hpp"
#include "tsf/sarima.hpp"
#include "tsf/series.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace tsf::bench {

enum class ModelFamily { arima, ets, seasonal_naive, neural };

[[nodiscard]] std::string to_string(ModelFamily f);

struct ModelEntry {
    /// Row label in reports, e.g. "ARIMA" or "BiLSTM".
    std::string name;
    ModelFamily family = ModelFamily::neural;
    /// Neural models: whether the fields below started from the tuned preset.
    bool paper_preset = true;
    nn::ModelSpec spec;
    nn::TrainConfig train;
    /// ARIMA: a fixed order, or nullopt to run the AIC grid over `candidates`.
    std::optional<sarima::SarimaOrder> order;
    std::vector<sarima::SarimaOrder> candidates;
};

enum class Evaluation { recursive, teacher_forced };

struct ExperimentConfig {
    std::filesystem::path data_path;
    std::string value_column = "value";
    std::string date_column = "date";
    int period = 12;
    /// Last month of the training portion.
    YearMonth train_end{2022, 12};
    int horizon = 12;
    std::size_t window_len = 12;
    std::vector<ModelEntry> models;
    int n_runs = 10;
    std::uint64_t base_seed = 42;
    std::vector<metrics::Scale> scales = {metrics::Scale::normalized, metrics::Scale::original};
    Evaluation evaluation = Evaluation::recursive;
    unsigned workers = 1;
    std::filesystem::path output_dir = "out";

    /// Throws ConfigError when an invariant fails.
    void validate() const;
};

/// All eight compared models with tuned presets plus the seasonal-naive baseline.
[[nodiscard]] ExperimentConfig default_config();

/// Default entry for a family or neural kind name ("arima", "ets",
/// "seasonal_naive", "lstm", ...).
[[nodiscard]] ModelEntry default_model_entry(const std::string& type);

/// Parses the JSON configuration. Unknown keys, wrong types and invalid values
/// raise ConfigError naming the offending key.
[[nodiscard]] ExperimentConfig parse_config(const std::string& json_text);
[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path& path);
/// Fully resolved JSON; parse_config(config_to_json(c)) reproduces c.
[[nodiscard]] std::string config_to_json(const ExperimentConfig& config);

} // namespace tsf::bench
