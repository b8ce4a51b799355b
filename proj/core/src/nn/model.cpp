#include "tsf/nn/model.hpp"

#include <stdexcept>

namespace tsf::nn {

std::string to_string(ModelKind k) {
    switch (k) {
    case ModelKind::simple_rnn: return "simple_rnn";
    case ModelKind::lstm: return "lstm";
    case ModelKind::gru: return "gru";
    case ModelKind::bilstm: return "bilstm";
    case ModelKind::bigru: return "bigru";
    case ModelKind::transformer: return "transformer";
    }
    return "lstm";
}

ModelKind model_kind_from_string(std::string_view name) {
    for (ModelKind k : all_model_kinds()) {
        if (to_string(k) == name) return k;
    }
    throw std::invalid_argument("unknown model kind '" + std::string(name) + "'");
}

const std::vector<ModelKind>& all_model_kinds() {
    static const std::vector<ModelKind> kinds = {ModelKind::simple_rnn, ModelKind::lstm,   ModelKind::gru,
                                                 ModelKind::bilstm,     ModelKind::bigru, ModelKind::transformer};
    return kinds;
}

std::vector<const Parameter*> SequenceRegressor::parameters() const {
    auto mut = const_cast<SequenceRegressor*>(this)->parameters();
    return {mut.begin(), mut.end()};
}

std::size_t SequenceRegressor::parameter_count() const {
    std::size_t n = 0;
    for (const Parameter* p : parameters()) n += p->value.size();
    return n;
}

Vector SequenceRegressor::predict(const Matrix& windows) {
    Rng unused(0);
    const Matrix out = forward(windows, false, unused);
    return out.col(out.cols() - 1);
}

double SequenceRegressor::predict_next(std::span<const double> window) {
    if (window.size() != window_len()) throw std::invalid_argument("predict_next: window length mismatch");
    Matrix w(1, static_cast<Eigen::Index>(window.size()));
    for (std::size_t i = 0; i < window.size(); ++i) w(0, static_cast<Eigen::Index>(i)) = window[i];
    return predict(w)(0);
}

void copy_parameters(const SequenceRegressor& from, SequenceRegressor& to) {
    const auto src = from.parameters();
    auto dst = to.parameters();
    if (src.size() != dst.size()) throw std::invalid_argument("copy_parameters: architectures differ");
    for (std::size_t i = 0; i < src.size(); ++i) {
        if (src[i]->value.shape() != dst[i]->value.shape()) {
            throw std::invalid_argument("copy_parameters: shape mismatch at '" + src[i]->name + "'");
        }
        dst[i]->value = src[i]->value;
    }
}

} // namespace tsf::nn
