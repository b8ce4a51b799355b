#pragma once

#include "tsf/nn/model.hpp"
#include "tsf/nn/optimizer.hpp"
#include "tsf/series.hpp"

#include <cstdint>
#include <vector>

namespace tsf::nn {

struct TrainConfig {
    int epochs = 50;
    int batch_size = 32;
    double learning_rate = 0.001;
    OptimizerKind optimizer = OptimizerKind::adam;
    double dropout_rate = 0.3;
    double validation_fraction = 0.2;
    std::uint64_t seed = 0;
    /// Global gradient-norm ceiling; <= 0 disables clipping.
    double clip_norm = 5.0;
    /// Draw fresh parameters from the seeded generator before training.
    bool initialize = true;

    /// Throws std::invalid_argument on out-of-range fields.
    void validate() const;
};

struct TrainingHistory {
    /// Mean training objective per epoch (dropout active).
    std::vector<double> train_loss;
    /// Forecast MSE on the held-out tail per epoch (inference mode). Empty
    /// when the split leaves no validation windows.
    std::vector<double> val_loss;
    /// Number of clipped updates per epoch.
    std::vector<int> clip_events;
    int best_epoch = -1;
    double best_val_loss = 0.0;
    std::size_t n_train = 0;
    std::size_t n_validation = 0;
    std::uint64_t optimizer_steps = 0;
};

/// Chronological split: the last floor(n * fraction) windows form the validation set.
[[nodiscard]] std::size_t validation_count(std::size_t n_windows, double fraction);

[[nodiscard]] Batch to_batch(const WindowedDataset& data, std::size_t begin, std::size_t end);
[[nodiscard]] Batch gather(const WindowedDataset& data, const std::vector<std::size_t>& rows);

/// Mini-batch training with per-epoch shuffling of the training portion,
/// best-validation parameter restoration and global-norm clipping.
/// Throws NumericalError (naming epoch and batch) on a non-finite loss.
TrainingHistory train(SequenceRegressor& model, const WindowedDataset& data, const TrainConfig& config);

/// Forecast MSE of the model's final-step output on the given windows.
[[nodiscard]] double forecast_mse(SequenceRegressor& model, const Batch& batch);

} // namespace tsf::nn
