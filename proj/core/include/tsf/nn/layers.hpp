#pragma once

#include "tsf/nn/tensor.hpp"

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tsf::nn {

enum class Activation { sigmoid, tanh, relu, identity };

[[nodiscard]] std::string to_string(Activation a);
[[nodiscard]] Activation activation_from_string(std::string_view name);

[[nodiscard]] Matrix apply(Activation a, const Matrix& pre);
/// Derivative expressed through the activation's output y = a(pre).
[[nodiscard]] Matrix derivative_from_output(Activation a, const Matrix& out);

/// y = activation(x W^T + b) with rows as samples.
class DenseLayer {
public:
    DenseLayer() = default;
    DenseLayer(std::string name, std::size_t in, std::size_t out, Activation act);

    void init(Rng& rng);

    [[nodiscard]] std::size_t in_features() const { return static_cast<std::size_t>(weight_.value.cols()); }
    [[nodiscard]] std::size_t out_features() const { return static_cast<std::size_t>(weight_.value.rows()); }
    [[nodiscard]] Activation activation() const { return act_; }

    [[nodiscard]] Parameter& weight() { return weight_; }
    [[nodiscard]] Parameter& bias() { return bias_; }
    [[nodiscard]] const Parameter& weight() const { return weight_; }
    [[nodiscard]] const Parameter& bias() const { return bias_; }
    [[nodiscard]] std::vector<Parameter*> parameters() { return {&weight_, &bias_}; }

    /// Caches input and output for backward. Throws on shape mismatch.
    [[nodiscard]] Matrix forward(const Matrix& x);
    /// Pure forward without caching.
    [[nodiscard]] Matrix evaluate(const Matrix& x) const;
    /// Accumulates parameter gradients and returns dL/dx.
    [[nodiscard]] Matrix backward(const Matrix& upstream);

private:
    Parameter weight_;
    Parameter bias_;
    Activation act_ = Activation::identity;
    Matrix input_;
    Matrix output_;
};

/// Mean squared error over all entries and its gradient 2 (pred - target) / n.
[[nodiscard]] std::pair<double, Matrix> mse_loss(const Matrix& pred, const Matrix& target);

/// Inverted dropout mask (entries 0 or 1/(1-rate)); all ones when not training.
[[nodiscard]] Matrix dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate, bool training, Rng& rng);
[[nodiscard]] Tensor dropout_apply(const Tensor& x, double rate, bool training, Rng& rng);

} // namespace tsf::nn
