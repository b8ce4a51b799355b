#include "tsf/bench/pipeline.hpp"

#include "tsf/decomposition.hpp"
#include "tsf/error.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <sstream>

namespace tsf::bench {

using nlohmann::json;

namespace {

json test_to_json(const stats::TestResult& r) {
    return {{"test", r.test}, {"statistic", r.statistic}, {"p_value", r.p_value}, {"aux", r.aux}};
}

json optional_json(const std::vector<std::optional<double>>& v) {
    json out = json::array();
    for (const auto& x : v) out.push_back(x ? json(*x) : json(nullptr));
    return out;
}

json months_json(const TimeSeries& ts) {
    json out = json::array();
    for (std::size_t i = 0; i < ts.size(); ++i) out.push_back(ts.month_at(i).to_string());
    return out;
}

json order_json(const sarima::SarimaOrder& o) {
    return {{"p", o.p}, {"d", o.d}, {"q", o.q}, {"P", o.P}, {"D", o.D}, {"Q", o.Q}, {"s", o.s}, {"drift", o.include_drift},
            {"label", o.label()}};
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return 1;
    if (dynamic_cast<const DataError*>(&e)) return 2;
    if (dynamic_cast<const NumericalError*>(&e)) return 3;
    if (dynamic_cast<const std::invalid_argument*>(&e)) return 2;
    return 3;
}

} // namespace

StageError::StageError(std::string stage, const std::string& cause, int exit_code)
    : std::runtime_error(stage + ": " + cause), stage_(std::move(stage)), exit_code_(exit_code) {}

TimeSeries ingest(const ExperimentConfig& config) {
    return load_csv(config.data_path, config.value_column, config.date_column, config.period);
}

std::string ingest_json(const TimeSeries& series, const SplitData& split) {
    const auto d = descriptive_stats(series);
    json j;
    j["start"] = series.start().to_string();
    j["end"] = series.last().to_string();
    j["n"] = series.size();
    j["period"] = series.period();
    j["descriptive"] = {{"min", d.min}, {"q1", d.q1}, {"median", d.median}, {"mean", d.mean}, {"q3", d.q3}, {"max", d.max}};
    j["train"] = {{"start", split.train.start().to_string()}, {"end", split.train.last().to_string()}, {"n", split.train.size()}};
    j["test"] = {{"start", split.test.start().to_string()}, {"end", split.test.last().to_string()}, {"n", split.test.size()}};
    j["scaler"] = {{"min", split.scaler.lo()}, {"max", split.scaler.hi()}};
    return j.dump(2) + "\n";
}

std::string decomposition_json(const TimeSeries& series) {
    const Decomposition d = classical_additive_decompose(series);
    json j;
    j["period"] = d.period;
    j["months"] = months_json(series);
    j["observed"] = std::vector<double>(series.values().begin(), series.values().end());
    j["trend"] = optional_json(d.trend);
    j["seasonal"] = d.seasonal;
    j["residual"] = optional_json(d.residual);
    j["seasonal_figure"] = d.figure;
    return j.dump(2) + "\n";
}

std::string season_plot_json(const TimeSeries& series) {
    json traces = json::array();
    for (const auto& t : season_plot_data(series)) traces.push_back({{"year", t.year}, {"first_month", t.first_month}, {"values", t.values}});
    return json{{"period", series.period()}, {"traces", traces}}.dump(2) + "\n";
}

std::string tests_json(const TimeSeries& full, const TimeSeries& train) {
    json j;
    j["mann_kendall"] = test_to_json(stats::mann_kendall(full.values()));
    j["mann_kendall"]["series"] = "full";
    j["kruskal_wallis"] = test_to_json(stats::kruskal_wallis_seasonality(full));
    j["kruskal_wallis"]["series"] = "full";
    const int lag = stats::kpss_short_lag(train.size());
    j["kpss_levels"] = test_to_json(stats::kpss_level(train.values(), lag));
    j["kpss_levels"]["series"] = "train";
    const auto diffed = difference(train.values(), 1, 0, train.period());
    j["kpss_first_difference"] = test_to_json(stats::kpss_level(diffed, stats::kpss_short_lag(diffed.size())));
    j["kpss_first_difference"]["series"] = "train";
    return j.dump(2) + "\n";
}

EtsAnalysis analyse_ets(const SplitData& split) {
    EtsAnalysis a;
    a.fit = ets::fit_holt_winters(split.train);
    a.ljung_box = stats::ljung_box(a.fit.residuals, 24);
    a.lilliefors = stats::lilliefors(a.fit.residuals);
    a.goldfeld_quandt = stats::goldfeld_quandt(a.fit.residuals);
    a.forecast = ets::hw_forecast(a.fit, static_cast<int>(split.test.size()));
    return a;
}

std::string ets_json(const EtsAnalysis& a, const SplitData& split) {
    json j;
    j["alpha"] = a.fit.params.alpha;
    j["beta"] = a.fit.params.beta;
    j["gamma"] = a.fit.params.gamma;
    j["sse"] = a.fit.sse;
    j["final_state"] = {{"level", a.fit.params.state.level},
                        {"slope", a.fit.params.state.slope},
                        {"seasonals", a.fit.params.state.seasonals}};
    j["diagnostics"] = {{"ljung_box", test_to_json(a.ljung_box)},
                        {"lilliefors", test_to_json(a.lilliefors)},
                        {"goldfeld_quandt", test_to_json(a.goldfeld_quandt)}};
    j["fitted_start"] = split.train.month_at(static_cast<std::size_t>(a.fit.period)).to_string();
    j["fitted"] = a.fit.fitted;
    j["residuals"] = a.fit.residuals;
    j["forecast_start"] = split.test.start().to_string();
    j["forecast"] = a.forecast;
    j["optimizer_trace"] = a.fit.optimizer_trace;
    return j.dump(2) + "\n";
}

SarimaAnalysis analyse_sarima(const SplitData& split, const sarima::SarimaOrder& order) {
    SarimaAnalysis a;
    a.fit = sarima::fit(split.train, order);
    const std::size_t k = static_cast<std::size_t>(order.d + order.D * order.s);
    a.residuals.assign(k, 0.0);
    a.residuals.insert(a.residuals.end(), a.fit.residuals.begin(), a.fit.residuals.end());
    a.ljung_box = stats::ljung_box(a.residuals, 12);
    a.lilliefors = stats::lilliefors(a.residuals);
    a.goldfeld_quandt = stats::goldfeld_quandt(a.residuals);
    for (int lag = 12; lag <= 72 && static_cast<std::size_t>(lag) < a.residuals.size(); lag += 12) {
        a.box_pierce.push_back(stats::ljung_box(a.residuals, lag, 0, stats::PortmanteauVariant::box_pierce));
    }
    const int max_lag = std::min<int>(24, static_cast<int>(a.residuals.size() / 2) - 1);
    a.residual_acf = sarima::acf_pacf(a.residuals, max_lag);
    a.forecast = sarima::forecast(a.fit, static_cast<int>(split.test.size()));
    return a;
}

std::string sarima_json(const SarimaAnalysis& a, const SplitData& split) {
    json j;
    j["order"] = order_json(a.fit.order);
    j["aic"] = a.fit.aic;
    j["loglik"] = a.fit.loglik;
    j["sigma2"] = a.fit.sigma2;
    j["converged"] = a.fit.converged;
    j["warnings"] = a.fit.warnings;
    j["coefficients"] = json::array();
    for (const auto& c : a.fit.table) {
        j["coefficients"].push_back({{"name", c.name}, {"estimate", c.value}, {"se", optional_number(c.se)},
                                     {"z", optional_number(c.z)}, {"p_value", optional_number(c.p_value)}});
    }
    j["diagnostics"] = {{"ljung_box", test_to_json(a.ljung_box)},
                        {"lilliefors", test_to_json(a.lilliefors)},
                        {"goldfeld_quandt", test_to_json(a.goldfeld_quandt)}};
    j["box_pierce"] = json::array();
    for (const auto& bp : a.box_pierce) j["box_pierce"].push_back(test_to_json(bp));
    j["residual_months_start"] = split.train.start().to_string();
    j["residuals"] = a.residuals;
    j["residual_acf"] = {{"lags", a.residual_acf.acf.size()},
                         {"acf", a.residual_acf.acf},
                         {"pacf", a.residual_acf.pacf},
                         {"bound", a.residual_acf.bound}};
    j["forecast_start"] = split.test.start().to_string();
    j["forecast"] = a.forecast;
    j["optimizer_trace"] = a.fit.optimizer_trace;
    return j.dump(2) + "\n";
}

std::string sarima_grid_json(const sarima::GridResult& grid) {
    json j;
    j["ranked"] = json::array();
    for (const auto& f : grid.ranked) {
        j["ranked"].push_back({{"order", order_json(f.order)}, {"aic", f.aic}, {"loglik", f.loglik}, {"sigma2", f.sigma2},
                               {"coefficients", f.order.coefficient_count()}, {"converged", f.converged}, {"warnings", f.warnings}});
    }
    j["failures"] = json::array();
    for (const auto& f : grid.failures) j["failures"].push_back({{"order", order_json(f.order)}, {"reason", f.reason}});
    return j.dump(2) + "\n";
}

std::string sarima_grid_markdown(const sarima::GridResult& grid) {
    std::ostringstream out;
    out << "| Rank | Model | AIC | Log-likelihood |\n|---|---|---|---|\n";
    for (std::size_t i = 0; i < grid.ranked.size(); ++i) {
        const auto& f = grid.ranked[i];
        out << "| " << i + 1 << " | " << f.order.label() << " | " << fixed(f.aic, 3) << " | " << fixed(f.loglik, 3) << " |\n";
    }
    for (const auto& f : grid.failures) out << "| - | " << f.order.label() << " | failed: " << f.reason << " | |\n";
    return out.str();
}

std::string coefficient_markdown(const sarima::SarimaFit& fit) {
    std::ostringstream out;
    out << "| Coefficient | Estimate | Std. error | z | p-value |\n|---|---|---|---|---|\n";
    for (const auto& c : fit.table) {
        out << "| " << c.name << " | " << fixed(c.value, 4) << " | " << (c.se ? fixed(*c.se, 4) : "n/a") << " | "
            << (c.z ? fixed(*c.z, 3) : "n/a") << " | " << (c.p_value ? fixed(*c.p_value, 4) : "n/a") << " |\n";
    }
    return out.str();
}

std::string forecast_plot_json(const RunReport& report, const SplitData& split) {
    json j;
    j["train_start"] = split.train.start().to_string();
    j["train_actual"] = std::vector<double>(split.train.values().begin(), split.train.values().end());
    j["test_start"] = split.test.start().to_string();
    j["test_actual"] = report.test_actual;
    j["evaluation"] = report.config.evaluation == Evaluation::recursive ? "recursive" : "teacher_forced";
    j["models"] = json::array();
    for (const auto& m : report.models) {
        json entry = {{"name", m.name}};
        const RunRecord* first = nullptr;
        std::vector<double> mean(report.test_actual.size(), 0.0);
        std::size_t ok = 0;
        for (const auto& r : m.runs) {
            if (!r.ok) continue;
            if (!first) first = &r;
            for (std::size_t i = 0; i < mean.size() && i < r.test_forecast.size(); ++i) mean[i] += r.test_forecast[i];
            ++ok;
        }
        if (first) {
            for (double& v : mean) v /= static_cast<double>(ok);
            entry["seed"] = first->seed;
            entry["fitted_start"] = split.train.month_at(first->fitted_offset).to_string();
            entry["fitted"] = first->train_fitted;
            entry["forecast"] = first->test_forecast;
            entry["mean_forecast"] = mean;
        }
        j["models"].push_back(entry);
    }
    return j.dump(2) + "\n";
}

std::string grid_search_json(const GridSearchResult& result) {
    const auto trial = [](const Trial& t) {
        return json{{"index", t.index},
                    {"units", t.units},
                    {"activation", nn::to_string(t.activation)},
                    {"learning_rate", t.learning_rate},
                    {"optimizer", nn::to_string(t.optimizer)},
                    {"batch_size", t.batch_size},
                    {"parameters", t.parameter_count},
                    {"val_mse", t.ok ? json(t.val_mse) : json(nullptr)},
                    {"failure", t.failure}};
    };
    json j;
    j["trials"] = json::array();
    for (const auto& t : result.trials) j["trials"].push_back(trial(t));
    j["failures"] = json::array();
    for (const auto& t : result.failures) j["failures"].push_back(trial(t));
    if (!result.trials.empty()) j["best"] = trial(result.best());
    return j.dump(2) + "\n";
}

PipelineResult run_pipeline(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
    PipelineResult result;
    std::filesystem::create_directories(out_dir);
    const auto emit = [&](const std::string& name, const std::string& text) {
        const auto path = out_dir / name;
        write_text(path, text);
        result.artifacts.push_back(path);
    };
    std::string current;
    try {
        current = "config";
        config.validate();

        current = "ingest";
        result.stages.push_back(current);
        const TimeSeries series = ingest(config);
        const SplitData split = prepare_split(series, config.train_end, config.horizon);
        const std::string ingest_text = ingest_json(series, split);
        emit("config.json", config_to_json(config));
        emit("ingest.json", ingest_text);

        current = "decompose";
        result.stages.push_back(current);
        emit("decomposition.json", decomposition_json(series));
        emit("season_plot.json", season_plot_json(series));

        current = "tests";
        result.stages.push_back(current);
        emit("tests.json", tests_json(series, split.train));

        const auto has = [&](ModelFamily f) {
            return std::any_of(config.models.begin(), config.models.end(), [&](const ModelEntry& m) { return m.family == f; });
        };

        if (has(ModelFamily::ets)) {
            current = "ets";
            result.stages.push_back(current);
            emit("ets.json", ets_json(analyse_ets(split), split));
        }

        std::map<std::string, sarima::SarimaOrder> arima_orders;
        for (const auto& m : config.models) {
            if (m.family != ModelFamily::arima) continue;
            current = "sarima";
            if (result.stages.back() != current) result.stages.push_back(current);
            sarima::SarimaOrder order;
            if (m.order) {
                order = *m.order;
            } else {
                const auto grid = sarima::grid_search(split.train, m.candidates, {}, config.workers);
                emit("sarima_grid.json", sarima_grid_json(grid));
                emit("sarima_grid.md", sarima_grid_markdown(grid));
                if (grid.ranked.empty()) throw NumericalError("every SARIMA candidate failed");
                order = grid.ranked.front().order;
            }
            arima_orders[m.name] = order;
            current = "sarima-diagnostics";
            result.stages.push_back(current);
            const SarimaAnalysis a = analyse_sarima(split, order);
            emit("sarima_fit.json", sarima_json(a, split));
            emit("sarima_coefficients.md", coefficient_markdown(a.fit));
        }

        current = "models";
        result.stages.push_back(current);
        RunReport& report = result.report;
        report.config = config;
        report.test_start = split.test.start();
        report.test_actual.assign(split.test.values().begin(), split.test.values().end());
        for (const auto& m : config.models) {
            ModelResult mr;
            mr.name = m.name;
            mr.family = to_string(m.family);
            switch (m.family) {
            case ModelFamily::neural: {
                auto probe = nn::build_model([&] {
                    auto s = m.spec;
                    s.window_len = config.window_len;
                    return s;
                }());
                mr.metadata = probe->metadata();
                mr.metadata["optimizer"] = nn::to_string(m.train.optimizer);
                mr.metadata["learning_rate"] = fixed(m.train.learning_rate, 6);
                mr.metadata["batch_size"] = std::to_string(m.train.batch_size);
                mr.metadata["epochs"] = std::to_string(m.train.epochs);
                mr.metadata["parameters"] = std::to_string(probe->parameter_count());
                mr.runs = repeated_runs(
                    [&](std::uint64_t seed) {
                        return run_neural(split, m, config.window_len, config.evaluation, config.scales, seed);
                    },
                    config.n_runs, config.base_seed, config.workers);
                break;
            }
            case ModelFamily::arima: {
                const auto order = arima_orders.at(m.name);
                mr.metadata = {{"order", order.label()}};
                mr.runs = repeated_runs([&](std::uint64_t) { return run_arima(split, order, config.scales); }, 1,
                                        config.base_seed);
                break;
            }
            case ModelFamily::ets:
                mr.metadata = {{"method", "additive Holt-Winters"}};
                mr.runs = repeated_runs([&](std::uint64_t) { return run_ets(split, config.scales); }, 1, config.base_seed);
                break;
            case ModelFamily::seasonal_naive:
                mr.metadata = {{"method", "y_hat(t) = y(t - period)"}};
                mr.runs = repeated_runs([&](std::uint64_t) { return run_seasonal_naive(split, config.scales); }, 1,
                                        config.base_seed);
                break;
            }
            aggregate(mr);
            report.models.push_back(std::move(mr));
        }

        current = "report";
        result.stages.push_back(current);
        emit("report.json", report_to_json(report));
        emit("report.md", report_to_markdown(report));
        emit("forecasts.json", forecast_plot_json(report, split));
        emit("environment.json", environment_stamp_json());
        emit("stages.json", json(result.stages).dump(2) + "\n");
    } catch (const std::exception& e) {
        const int code = exit_code_for(e);
        try {
            write_text(out_dir / "error.log", "stage: " + current + "\ncause: " + e.what() + "\n");
        } catch (...) {
        }
        throw StageError(current, e.what(), code);
    }
    return result;
}

} // namespace tsf::bench
