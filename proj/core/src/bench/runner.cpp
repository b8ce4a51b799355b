#include "tsf/bench/runner.hpp"

#include "tsf/error.hpp"
#include "tsf/ets.hpp"
#include "tsf/parallel.hpp"
#include "tsf/sarima.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace tsf::bench {

SplitData prepare_split(const TimeSeries& full, YearMonth train_end, int horizon) {
    if (horizon < 1) throw std::invalid_argument("prepare_split: horizon must be >= 1");
    auto [train, rest] = train_test_split(full, train_end);
    if (rest.size() < static_cast<std::size_t>(horizon)) {
        throw DataError("only " + std::to_string(rest.size()) + " months follow " + train_end.to_string() + ", need " +
                        std::to_string(horizon));
    }
    std::vector<double> test(rest.values().begin(), rest.values().begin() + horizon);
    TimeSeries test_ts(rest.start(), std::move(test), full.period());
    const MinMaxScaler scaler = MinMaxScaler::fit(train);
    return {std::move(train), std::move(test_ts), scaler};
}

std::string metric_key(const std::string& split, metrics::Scale scale, const std::string& metric) {
    return split + "." + metrics::to_string(scale) + "." + metric;
}

MetricSummary summarize(std::span<const double> values) {
    MetricSummary s;
    s.n = values.size();
    if (values.empty()) return s;
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.n);
    if (s.n > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.se = std::sqrt(ss / static_cast<double>(s.n - 1)) / std::sqrt(static_cast<double>(s.n));
    }
    return s;
}

void aggregate(ModelResult& result) {
    result.summary.clear();
    result.failures = 0;
    std::map<std::string, std::vector<double>> columns;
    for (const auto& r : result.runs) {
        if (!r.ok) {
            ++result.failures;
            continue;
        }
        for (const auto& [k, v] : r.metrics) columns[k].push_back(v);
    }
    for (const auto& [k, vs] : columns) result.summary[k] = summarize(vs);
}

std::vector<RunRecord> repeated_runs(const RunFn& fn, int n_runs, std::uint64_t base_seed, unsigned workers) {
    if (n_runs < 1) throw std::invalid_argument("repeated_runs: n_runs must be >= 1");
    std::vector<RunRecord> out(static_cast<std::size_t>(n_runs));
    parallel_for(out.size(), workers, [&](std::size_t i) {
        const std::uint64_t seed = base_seed + i;
        try {
            out[i] = fn(seed);
            out[i].seed = seed;
        } catch (const std::exception& e) {
            out[i] = RunRecord{};
            out[i].seed = seed;
            out[i].ok = false;
            out[i].failure = e.what();
        }
    });
    return out;
}

void score(RunRecord& rec, const SplitData& split, std::span<const double> train_actual, std::span<const double> train_pred,
           std::span<const double> test_pred, const std::vector<metrics::Scale>& scales) {
    const auto test_actual = split.test.values();
    for (metrics::Scale scale : scales) {
        const auto put = [&](const std::string& set, std::span<const double> a, std::span<const double> p) {
            std::vector<double> av(a.begin(), a.end());
            std::vector<double> pv(p.begin(), p.end());
            if (scale == metrics::Scale::normalized) {
                av = split.scaler.transform(av);
                pv = split.scaler.transform(pv);
            }
            const auto m = metrics::evaluate(av, pv, scale);
            rec.metrics[metric_key(set, scale, "mse")] = m.mse;
            rec.metrics[metric_key(set, scale, "mae")] = m.mae;
            rec.metrics[metric_key(set, scale, "gmrae")] = m.gmrae;
            rec.metrics[metric_key(set, scale, "theil_u1")] = m.theil_u1;
            rec.gmrae_floored[metric_key(set, scale, "gmrae")] = m.gmrae_floored;
        };
        if (!train_actual.empty()) put("train", train_actual, train_pred);
        put("test", test_actual, test_pred);
    }
    for (const auto& [k, v] : rec.metrics) {
        if (!std::isfinite(v)) throw NumericalError("non-finite metric " + k);
    }
}

std::vector<double> neural_forecast(nn::SequenceRegressor& model, std::span<const double> history,
                                    std::span<const double> future_actual, int horizon, Evaluation evaluation) {
    const std::size_t L = model.window_len();
    if (history.size() < L) throw std::invalid_argument("neural_forecast: history shorter than the window");
    if (evaluation == Evaluation::teacher_forced && future_actual.size() < static_cast<std::size_t>(horizon)) {
        throw std::invalid_argument("neural_forecast: teacher forcing needs the actual future values");
    }
    std::vector<double> window(history.end() - static_cast<long>(L), history.end());
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(horizon));
    for (int h = 0; h < horizon; ++h) {
        const double p = model.predict_next(window);
        if (!std::isfinite(p)) throw NumericalError("non-finite forecast at step " + std::to_string(h + 1));
        out.push_back(p);
        window.erase(window.begin());
        window.push_back(evaluation == Evaluation::recursive ? p : future_actual[static_cast<std::size_t>(h)]);
    }
    return out;
}

RunRecord run_neural(const SplitData& split, const ModelEntry& entry, std::size_t window_len, Evaluation evaluation,
                     const std::vector<metrics::Scale>& scales, std::uint64_t seed) {
    if (entry.family != ModelFamily::neural) throw std::invalid_argument("run_neural: not a neural model entry");
    const std::vector<double> scaled_train = split.scaler.transform(split.train.values());
    const std::vector<double> scaled_test = split.scaler.transform(split.test.values());
    const WindowedDataset data = make_windows(std::span<const double>(scaled_train), window_len);

    nn::ModelSpec spec = entry.spec;
    spec.window_len = window_len;
    spec.dropout = entry.train.dropout_rate;
    auto model = nn::build_model(spec);
    nn::TrainConfig cfg = entry.train;
    cfg.seed = seed;
    const nn::TrainingHistory hist = nn::train(*model, data, cfg);

    RunRecord rec;
    rec.seed = seed;
    rec.epochs = static_cast<int>(hist.train_loss.size());
    rec.best_epoch = hist.best_epoch;
    rec.final_train_loss = hist.train_loss.back();
    if (!hist.val_loss.empty()) rec.final_val_loss = hist.val_loss.back();

    const nn::Batch all = nn::to_batch(data, 0, data.size());
    const nn::Vector fitted_scaled = model->predict(all.windows);
    rec.train_fitted = split.scaler.inverse_transform(std::span<const double>(fitted_scaled.data(), static_cast<std::size_t>(fitted_scaled.size())));
    rec.fitted_offset = window_len;
    const auto forecast_scaled =
        neural_forecast(*model, scaled_train, scaled_test, static_cast<int>(split.test.size()), evaluation);
    rec.test_forecast = split.scaler.inverse_transform(forecast_scaled);

    const auto y = split.train.values();
    score(rec, split, y.subspan(window_len), rec.train_fitted, rec.test_forecast, scales);
    return rec;
}

RunRecord run_ets(const SplitData& split, const std::vector<metrics::Scale>& scales) {
    const auto fit = ets::fit_holt_winters(split.train);
    RunRecord rec;
    rec.train_fitted = fit.fitted;
    rec.fitted_offset = static_cast<std::size_t>(fit.period);
    rec.test_forecast = ets::hw_forecast(fit, static_cast<int>(split.test.size()));
    score(rec, split, split.train.values().subspan(rec.fitted_offset), rec.train_fitted, rec.test_forecast, scales);
    return rec;
}

RunRecord run_arima(const SplitData& split, const sarima::SarimaOrder& order, const std::vector<metrics::Scale>& scales) {
    const auto fit = sarima::fit(split.train, order);
    RunRecord rec;
    const std::size_t k = static_cast<std::size_t>(order.d + order.D * order.s);
    const auto y = split.train.values();
    rec.fitted_offset = k + fit.conditioning;
    for (std::size_t i = fit.conditioning; i < fit.residuals.size(); ++i) rec.train_fitted.push_back(y[k + i] - fit.residuals[i]);
    rec.test_forecast = sarima::forecast(fit, static_cast<int>(split.test.size()));
    score(rec, split, y.subspan(rec.fitted_offset), rec.train_fitted, rec.test_forecast, scales);
    return rec;
}

RunRecord run_seasonal_naive(const SplitData& split, const std::vector<metrics::Scale>& scales) {
    const auto y = split.train.values();
    const auto m = static_cast<std::size_t>(split.train.period());
    if (y.size() < m) throw DataError("seasonal naive: training series shorter than one season");
    RunRecord rec;
    rec.fitted_offset = m;
    for (std::size_t t = m; t < y.size(); ++t) rec.train_fitted.push_back(y[t - m]);
    std::vector<double> extended(y.begin(), y.end());
    for (std::size_t h = 0; h < split.test.size(); ++h) {
        extended.push_back(extended[extended.size() - m]);
        rec.test_forecast.push_back(extended.back());
    }
    score(rec, split, y.subspan(m), rec.train_fitted, rec.test_forecast, scales);
    return rec;
}

GridSearchSpec GridSearchSpec::paper() {
    return {{16, 32, 64, 128, 256, 512},
            {nn::Activation::relu, nn::Activation::tanh, nn::Activation::sigmoid},
            {0.001, 0.01, 0.1},
            {nn::OptimizerKind::adam, nn::OptimizerKind::rmsprop, nn::OptimizerKind::sgd},
            {16, 32, 64, 128}};
}

std::size_t GridSearchSpec::size() const {
    return units.size() * activations.size() * learning_rates.size() * optimizers.size() * batch_sizes.size();
}

GridSearchResult grid_search_nn(const nn::ModelPreset& base, const GridSearchSpec& spec, const WindowedDataset& data,
                                std::uint64_t seed, unsigned workers) {
    const std::size_t n = spec.size();
    if (n == 0) throw std::invalid_argument("grid_search_nn: empty search space");
    std::vector<Trial> trials(n);
    std::size_t idx = 0;
    for (auto u : spec.units) {
        for (auto a : spec.activations) {
            for (auto lr : spec.learning_rates) {
                for (auto o : spec.optimizers) {
                    for (auto b : spec.batch_sizes) {
                        Trial& t = trials[idx];
                        t.index = idx++;
                        t.units = u;
                        t.activation = a;
                        t.learning_rate = lr;
                        t.optimizer = o;
                        t.batch_size = b;
                    }
                }
            }
        }
    }
    parallel_for(n, workers, [&](std::size_t i) {
        Trial& t = trials[i];
        try {
            nn::ModelSpec s = base.spec;
            s.window_len = data.window_len;
            if (s.kind == nn::ModelKind::transformer) {
                s.transformer.embed_dim = t.units;
            } else {
                s.units = t.units;
                s.activation = t.activation;
            }
            nn::TrainConfig cfg = base.train;
            cfg.learning_rate = t.learning_rate;
            cfg.optimizer = t.optimizer;
            cfg.batch_size = t.batch_size;
            cfg.seed = seed;
            s.dropout = cfg.dropout_rate;
            auto model = nn::build_model(s);
            t.parameter_count = model->parameter_count();
            const auto hist = nn::train(*model, data, cfg);
            t.val_mse = hist.best_val_loss;
        } catch (const std::exception& e) {
            t.ok = false;
            t.failure = e.what();
        }
    });
    GridSearchResult out;
    for (auto& t : trials) (t.ok ? out.trials : out.failures).push_back(t);
    std::stable_sort(out.trials.begin(), out.trials.end(), [](const Trial& a, const Trial& b) {
        if (a.val_mse != b.val_mse) return a.val_mse < b.val_mse;
        if (a.parameter_count != b.parameter_count) return a.parameter_count < b.parameter_count;
        return a.index < b.index;
    });
    return out;
}

} // namespace tsf::bench
