#pragma once

#include "tsf/nn/tensor.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace tsf::nn {

enum class OptimizerKind { sgd, rmsprop, adam };

[[nodiscard]] std::string to_string(OptimizerKind k);
[[nodiscard]] OptimizerKind optimizer_from_string(std::string_view name);

struct OptimizerConfig {
    OptimizerKind kind = OptimizerKind::adam;
    double learning_rate = 0.001;
    double rho = 0.9;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Stateful first-order optimizer. State is allocated on the first step and
/// bound to the order and shapes of the parameter list it was given.
class Optimizer {
public:
    explicit Optimizer(OptimizerConfig config);

    /// Applies one update from the gradients currently stored in `params`.
    void step(const std::vector<Parameter*>& params);

    [[nodiscard]] std::uint64_t steps() const { return steps_; }
    [[nodiscard]] const OptimizerConfig& config() const { return config_; }
    /// Adam first moments, or empty for other kinds.
    [[nodiscard]] const std::vector<Tensor>& first_moments() const { return m_; }
    /// Adam second moments or the RMSProp squared-gradient average.
    [[nodiscard]] const std::vector<Tensor>& second_moments() const { return v_; }

private:
    void ensure_state(const std::vector<Parameter*>& params);

    OptimizerConfig config_;
    std::uint64_t steps_ = 0;
    std::vector<Tensor> m_;
    std::vector<Tensor> v_;
};

void zero_grad(const std::vector<Parameter*>& params);
[[nodiscard]] double global_grad_norm(const std::vector<Parameter*>& params);
/// Rescales all gradients so their joint L2 norm is at most `max_norm`.
/// Returns true when rescaling happened.
bool clip_global_norm(const std::vector<Parameter*>& params, double max_norm);

} // namespace tsf::nn
