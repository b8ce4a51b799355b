#include "tsf/nn/presets.hpp"

namespace tsf::nn {

ModelPreset paper_preset(ModelKind kind) {
    ModelPreset p;
    p.spec.kind = kind;
    p.train.epochs = 50;
    p.train.dropout_rate = 0.3;
    p.spec.dropout = 0.3;
    switch (kind) {
    case ModelKind::simple_rnn:
        p.spec.activation = Activation::sigmoid;
        p.train.optimizer = OptimizerKind::rmsprop;
        p.train.learning_rate = 0.001;
        p.train.batch_size = 32;
        break;
    case ModelKind::lstm:
        p.spec.activation = Activation::tanh;
        p.train.optimizer = OptimizerKind::adam;
        p.train.learning_rate = 0.01;
        p.train.batch_size = 32;
        break;
    case ModelKind::gru:
        p.spec.activation = Activation::relu;
        p.train.optimizer = OptimizerKind::sgd;
        p.train.learning_rate = 0.01;
        p.train.batch_size = 32;
        break;
    case ModelKind::bilstm:
    case ModelKind::bigru:
        p.spec.activation = Activation::tanh;
        p.train.optimizer = OptimizerKind::adam;
        p.train.learning_rate = 0.001;
        p.train.batch_size = 16;
        break;
    case ModelKind::transformer: {
        auto [cfg, train] = build_paper_transformer();
        p.spec.transformer = cfg;
        p.spec.window_len = cfg.window_len;
        p.spec.dropout = cfg.dropout;
        p.train = train;
        break;
    }
    }
    return p;
}

std::unique_ptr<SequenceRegressor> build_model(const ModelSpec& spec) {
    if (spec.kind == ModelKind::transformer) {
        TransformerConfig cfg = spec.transformer;
        cfg.window_len = spec.window_len;
        cfg.dropout = spec.dropout;
        return std::make_unique<TransformerModel>(cfg);
    }
    RecurrentConfig cfg;
    cfg.kind = spec.kind;
    cfg.units = spec.units;
    cfg.layers = spec.layers;
    cfg.activation = spec.activation;
    cfg.dropout = spec.dropout;
    cfg.window_len = spec.window_len;
    cfg.head_loss = spec.head_loss;
    return std::make_unique<RecurrentModel>(cfg);
}

BuiltModel build_paper_model(ModelKind kind) {
    const ModelPreset p = paper_preset(kind);
    return {build_model(p.spec), p.train};
}

} // namespace tsf::nn
