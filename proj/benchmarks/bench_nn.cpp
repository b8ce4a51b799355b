#include "tsf/nn/presets.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

namespace {

using namespace tsf::nn;

ModelKind kind_of(int64_t i) {
    constexpr ModelKind kinds[] = {ModelKind::simple_rnn, ModelKind::lstm,  ModelKind::gru,
                                   ModelKind::bilstm,     ModelKind::bigru, ModelKind::transformer};
    return kinds[i];
}

Matrix sine_windows(Eigen::Index rows, Eigen::Index len) {
    Matrix w(rows, len);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < len; ++c) w(r, c) = 0.5 + 0.4 * std::sin(0.5 * static_cast<double>(r + c));
    }
    return w;
}

// One forward and backward pass of a tuned-preset model on a batch of 32 windows.
void BM_PresetStep(benchmark::State& state) {
    const auto kind = kind_of(state.range(0));
    auto built = build_paper_model(kind);
    Rng rng(1);
    built.model->init(rng);
    const auto len = static_cast<Eigen::Index>(built.model->window_len());
    const Matrix w = sine_windows(32, len);
    const Vector next = Vector::Constant(32, 0.5);
    const Matrix target = built.model->training_targets(w, next);
    for (auto _ : state) {
        zero_grad(built.model->parameters());
        const Matrix out = built.model->forward(w, true, rng);
        built.model->backward(mse_loss(out, target).second);
        benchmark::ClobberMemory();
    }
    state.SetLabel(to_string(kind));
}
BENCHMARK(BM_PresetStep)->DenseRange(0, 5)->Unit(benchmark::kMillisecond);

// Full preset training on 156 windows of a 168-month series.
void BM_PresetTraining(benchmark::State& state) {
    const auto kind = kind_of(state.range(0));
    std::vector<double> y(168);
    for (std::size_t t = 0; t < y.size(); ++t) {
        y[t] = 0.5 + 0.4 * std::cos(2.0 * std::numbers::pi * static_cast<double>(t) / 12.0);
    }
    const auto data = tsf::make_windows(y, 12);
    for (auto _ : state) {
        auto built = build_paper_model(kind);
        built.train.seed = 1;
        benchmark::DoNotOptimize(train(*built.model, data, built.train));
    }
    state.SetLabel(to_string(kind));
}
BENCHMARK(BM_PresetTraining)->DenseRange(0, 5)->Unit(benchmark::kSecond)->Iterations(1);

} // namespace
