#pragma once

#include "tsf/nn/recurrent.hpp"
#include "tsf/nn/trainer.hpp"
#include "tsf/nn/transformer.hpp"

#include <memory>

namespace tsf::nn {

/// Architecture of any supported model kind. Recurrent fields are ignored for
/// the transformer and vice versa.
struct ModelSpec {
    ModelKind kind = ModelKind::lstm;
    std::size_t units = 64;
    std::size_t layers = 4;
    Activation activation = Activation::tanh;
    double dropout = 0.3;
    std::size_t window_len = 12;
    HeadLoss head_loss = HeadLoss::next_value;
    TransformerConfig transformer;
};

struct ModelPreset {
    ModelSpec spec;
    TrainConfig train;
};

/// Tuned settings reported for the influenza study (64 units, 4 layers,
/// 50 epochs, dropout 0.3, per-kind activation/optimizer/rate/batch).
[[nodiscard]] ModelPreset paper_preset(ModelKind kind);

/// Allocates an untrained model (parameters zero until init()).
[[nodiscard]] std::unique_ptr<SequenceRegressor> build_model(const ModelSpec& spec);

struct BuiltModel {
    std::unique_ptr<SequenceRegressor> model;
    TrainConfig train;
};

[[nodiscard]] BuiltModel build_paper_model(ModelKind kind);

} // namespace tsf::nn
