#pragma once

#include "tsf/nn/tensor.hpp"

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace tsf::nn {

enum class ModelKind { simple_rnn, lstm, gru, bilstm, bigru, transformer };

[[nodiscard]] std::string to_string(ModelKind k);
[[nodiscard]] ModelKind model_kind_from_string(std::string_view name);
[[nodiscard]] const std::vector<ModelKind>& all_model_kinds();

/// A one-step-ahead forecaster over fixed-length windows of scaled values.
///
/// `forward` maps a batch of windows (B x L) to the training outputs (B x K)
/// that `training_targets` pairs with. Column K-1 is always the forecast of
/// the value following the window.
class SequenceRegressor {
public:
    virtual ~SequenceRegressor() = default;

    [[nodiscard]] virtual ModelKind kind() const = 0;
    [[nodiscard]] virtual std::size_t window_len() const = 0;
    [[nodiscard]] virtual std::vector<Parameter*> parameters() = 0;
    [[nodiscard]] std::vector<const Parameter*> parameters() const;
    [[nodiscard]] std::size_t parameter_count() const;

    /// Re-draws every parameter from `rng`.
    virtual void init(Rng& rng) = 0;
    virtual void set_dropout_rate(double rate) = 0;
    [[nodiscard]] virtual double dropout_rate() const = 0;

    /// Caches whatever backward needs. `rng` drives dropout masks in training mode.
    [[nodiscard]] virtual Matrix forward(const Matrix& windows, bool training, Rng& rng) = 0;
    /// Accumulates dLoss/dParam given dLoss/dOutput of the last forward.
    virtual void backward(const Matrix& d_output) = 0;
    /// Targets matching forward's output layout, from the windows and their next values.
    [[nodiscard]] virtual Matrix training_targets(const Matrix& windows, const Vector& next) const = 0;

    /// Inference-mode forecasts of the value after each window.
    [[nodiscard]] Vector predict(const Matrix& windows);
    [[nodiscard]] double predict_next(std::span<const double> window);

    [[nodiscard]] virtual std::unique_ptr<SequenceRegressor> clone() const = 0;
    /// Architecture description recorded alongside results and snapshots.
    [[nodiscard]] virtual std::map<std::string, std::string> metadata() const = 0;
};

/// Copies parameter values between two models of identical architecture.
void copy_parameters(const SequenceRegressor& from, SequenceRegressor& to);

/// Windows as a B x L matrix and targets as a B vector.
struct Batch {
    Matrix windows;
    Vector targets;
};

} // namespace tsf::nn
