#include "tsf/nn/trainer.hpp"

#include "tsf/error.hpp"
#include "tsf/nn/layers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace tsf::nn {

void TrainConfig::validate() const {
    if (epochs < 1) throw std::invalid_argument("TrainConfig: epochs must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
    if (!(learning_rate >= 0.0)) throw std::invalid_argument("TrainConfig: learning_rate must be >= 0");
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw std::invalid_argument("TrainConfig: dropout_rate must lie in [0, 1)");
    if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
        throw std::invalid_argument("TrainConfig: validation_fraction must lie in (0, 1)");
    }
}

std::size_t validation_count(std::size_t n_windows, double fraction) {
    return static_cast<std::size_t>(std::floor(static_cast<double>(n_windows) * fraction));
}

Batch gather(const WindowedDataset& data, const std::vector<std::size_t>& rows) {
    Batch b;
    const auto L = static_cast<Eigen::Index>(data.window_len);
    b.windows.resize(static_cast<Eigen::Index>(rows.size()), L);
    b.targets.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& w = data.inputs.at(rows[r]);
        for (Eigen::Index t = 0; t < L; ++t) b.windows(static_cast<Eigen::Index>(r), t) = w[static_cast<std::size_t>(t)];
        b.targets(static_cast<Eigen::Index>(r)) = data.targets.at(rows[r]);
    }
    return b;
}

Batch to_batch(const WindowedDataset& data, std::size_t begin, std::size_t end) {
    std::vector<std::size_t> rows(end - begin);
    std::iota(rows.begin(), rows.end(), begin);
    return gather(data, rows);
}

double forecast_mse(SequenceRegressor& model, const Batch& batch) {
    const Vector pred = model.predict(batch.windows);
    return (pred - batch.targets).squaredNorm() / static_cast<double>(pred.size());
}

TrainingHistory train(SequenceRegressor& model, const WindowedDataset& data, const TrainConfig& config) {
    config.validate();
    if (data.size() == 0) throw std::invalid_argument("train: empty dataset");
    if (data.window_len != model.window_len()) throw std::invalid_argument("train: window length does not match the model");
    auto params = model.parameters();
    if (model.parameter_count() == 0) throw std::invalid_argument("train: model has no parameters");

    TrainingHistory hist;
    hist.n_validation = validation_count(data.size(), config.validation_fraction);
    hist.n_train = data.size() - hist.n_validation;
    if (hist.n_train == 0) throw std::invalid_argument("train: validation split leaves no training windows");

    Rng rng(config.seed);
    if (config.initialize) model.init(rng);
    model.set_dropout_rate(config.dropout_rate);

    const Batch val = hist.n_validation > 0 ? to_batch(data, hist.n_train, data.size()) : Batch{};
    Optimizer opt({config.optimizer, config.learning_rate});
    std::vector<std::size_t> order(hist.n_train);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto bs = static_cast<std::size_t>(config.batch_size);

    std::unique_ptr<SequenceRegressor> best;
    double best_score = std::numeric_limits<double>::infinity();

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double loss_sum = 0.0;
        std::size_t seen = 0;
        int clips = 0;
        for (std::size_t start = 0, batch_no = 0; start < order.size(); start += bs, ++batch_no) {
            const std::size_t stop = std::min(order.size(), start + bs);
            const Batch b = gather(data, {order.begin() + static_cast<long>(start), order.begin() + static_cast<long>(stop)});
            zero_grad(params);
            const Matrix out = model.forward(b.windows, true, rng);
            const auto [loss, grad] = mse_loss(out, model.training_targets(b.windows, b.targets));
            if (!std::isfinite(loss)) {
                throw NumericalError("non-finite training loss at epoch " + std::to_string(epoch + 1) + ", batch " +
                                     std::to_string(batch_no + 1));
            }
            model.backward(grad);
            if (clip_global_norm(params, config.clip_norm)) ++clips;
            opt.step(params);
            loss_sum += loss * static_cast<double>(stop - start);
            seen += stop - start;
        }
        hist.train_loss.push_back(loss_sum / static_cast<double>(seen));
        hist.clip_events.push_back(clips);

        double score = hist.train_loss.back();
        if (hist.n_validation > 0) {
            score = forecast_mse(model, val);
            if (!std::isfinite(score)) {
                throw NumericalError("non-finite validation loss at epoch " + std::to_string(epoch + 1));
            }
            hist.val_loss.push_back(score);
        }
        if (score < best_score) {
            best_score = score;
            hist.best_epoch = epoch + 1;
            best = model.clone();
        }
    }
    if (best) copy_parameters(*best, model);
    hist.best_val_loss = best_score;
    hist.optimizer_steps = opt.steps();
    return hist;
}

} // namespace tsf::nn
