#include "tsf/bench/config.hpp"
#include "tsf/bench/pipeline.hpp"
#include "tsf/bench/report.hpp"
#include "tsf/bench/runner.hpp"
#include "tsf/error.hpp"
#include "tsf/nn/snapshot.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <optional>
#include <sstream>

namespace {

using namespace tsf;
using namespace tsf::bench;

struct Globals {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
    std::string out;
    std::string data;
    std::string value_column;
    std::string date_column;
};

ExperimentConfig resolve(const Globals& g) {
    ExperimentConfig c = g.config_path.empty() ? default_config() : load_config(g.config_path);
    if (!g.data.empty()) c.data_path = g.data;
    if (!g.value_column.empty()) c.value_column = g.value_column;
    if (!g.date_column.empty()) c.date_column = g.date_column;
    if (g.seed) c.base_seed = *g.seed;
    if (g.workers) c.workers = *g.workers;
    if (!g.out.empty()) c.output_dir = g.out;
    c.validate();
    return c;
}

void emit(const ExperimentConfig& c, const std::string& name, const std::string& text) {
    write_text(c.output_dir / name, text);
    std::cout << text;
}

sarima::SarimaOrder parse_order(const std::string& text, bool drift) {
    std::vector<int> v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            v.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw ConfigError("--order: '" + item + "' is not an integer");
        }
    }
    if (v.size() != 6 && v.size() != 7) throw ConfigError("--order expects p,d,q,P,D,Q[,s]");
    sarima::SarimaOrder o{v[0], v[1], v[2], v[3], v[4], v[5], v.size() == 7 ? v[6] : 12, drift};
    try {
        o.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return o;
}

template <typename T, typename Fn>
std::vector<T> parse_list(const std::vector<std::string>& items, Fn fn) {
    std::vector<T> out;
    for (const auto& s : items) out.push_back(fn(s));
    return out;
}

ModelEntry neural_entry(const std::string& name) {
    ModelEntry entry;
    try {
        entry = default_model_entry(name);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("--model: ") + e.what());
    }
    if (entry.family != ModelFamily::neural) throw ConfigError("--model must name a neural kind");
    return entry;
}

int exit_code(const std::exception& e) {
    if (const auto* s = dynamic_cast<const StageError*>(&e)) return s->exit_code();
    if (dynamic_cast<const ConfigError*>(&e)) return 1;
    if (dynamic_cast<const DataError*>(&e)) return 2;
    if (dynamic_cast<const NumericalError*>(&e)) return 3;
    if (dynamic_cast<const std::invalid_argument*>(&e)) return 2;
    return 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monthly time-series forecasting toolkit: statistical tests, ETS, SARIMA and neural forecasters"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config_path, "Experiment configuration (JSON)")->check(CLI::ExistingFile);
    app.add_option("--seed", g.seed, "Base seed (run i uses seed + i)");
    app.add_option("--workers", g.workers, "Concurrent workers")->check(CLI::PositiveNumber);
    app.add_option("--out", g.out, "Output directory");
    app.add_option("--data", g.data, "CSV file (overrides the config)");
    app.add_option("--value-column", g.value_column, "Value column name");
    app.add_option("--date-column", g.date_column, "Date column name");

    auto* ingest_cmd = app.add_subcommand("ingest", "Load and validate the series, print a summary");
    auto* decompose_cmd = app.add_subcommand("decompose", "Classical additive decomposition and season-plot data");
    auto* tests_cmd = app.add_subcommand("tests", "Trend, seasonality and stationarity tests");
    auto* ets_cmd = app.add_subcommand("fit-ets", "Fit additive Holt-Winters with residual diagnostics");
    auto* sarima_cmd = app.add_subcommand("fit-sarima", "Fit one SARIMA order with diagnostics");
    std::string order_text;
    bool drift = false;
    sarima_cmd->add_option("--order", order_text, "p,d,q,P,D,Q[,s]")->required();
    sarima_cmd->add_flag("--drift", drift, "Include a constant in the differenced series");
    auto* grid_sarima_cmd = app.add_subcommand("grid-sarima", "AIC search over the tentative SARIMA candidates");

    auto* train_cmd = app.add_subcommand("train", "Train one neural model with its tuned preset");
    std::string model_name;
    std::optional<int> epochs;
    std::string snapshot_path;
    train_cmd->add_option("--model", model_name, "simple_rnn|lstm|gru|bilstm|bigru|transformer")->required();
    train_cmd->add_option("--epochs", epochs, "Override the epoch count");
    train_cmd->add_option("--snapshot", snapshot_path, "Write trained parameters here");

    auto* grid_nn_cmd = app.add_subcommand("grid-nn", "Hyperparameter grid search for one neural kind");
    std::string grid_model;
    std::vector<std::string> units, activations, lrs, optimizers, batch_sizes;
    std::optional<int> grid_epochs;
    grid_nn_cmd->add_option("--model", grid_model, "Neural model kind")->required();
    grid_nn_cmd->add_option("--units", units, "Unit counts (default 16..512)")->delimiter(',');
    grid_nn_cmd->add_option("--activations", activations, "Activations")->delimiter(',');
    grid_nn_cmd->add_option("--learning-rates", lrs, "Learning rates")->delimiter(',');
    grid_nn_cmd->add_option("--optimizers", optimizers, "Optimizers")->delimiter(',');
    grid_nn_cmd->add_option("--batch-sizes", batch_sizes, "Batch sizes")->delimiter(',');
    grid_nn_cmd->add_option("--epochs", grid_epochs, "Override the epoch count");

    auto* bench_cmd = app.add_subcommand("benchmark", "Run the full pipeline and write the comparison report");
    auto* report_cmd = app.add_subcommand("report", "Re-render a stored report.json as markdown");
    std::string report_input;
    report_cmd->add_option("--input", report_input, "report.json to render")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (*report_cmd) {
            const RunReport r = report_from_json(read_text(report_input));
            const std::string md = report_to_markdown(r);
            if (!g.out.empty()) {
                write_text(std::filesystem::path(g.out) / "report.json", report_to_json(r));
                write_text(std::filesystem::path(g.out) / "report.md", md);
            }
            std::cout << md;
            return 0;
        }

        const ExperimentConfig c = resolve(g);
        if (*bench_cmd) {
            const auto res = run_pipeline(c, c.output_dir);
            std::cout << report_to_markdown(res.report);
            std::cerr << "wrote " << res.artifacts.size() << " artifacts to " << c.output_dir.string() << "\n";
            return 0;
        }

        const TimeSeries series = ingest(c);
        const SplitData split = prepare_split(series, c.train_end, c.horizon);
        if (*ingest_cmd) {
            emit(c, "ingest.json", ingest_json(series, split));
        } else if (*decompose_cmd) {
            write_text(c.output_dir / "season_plot.json", season_plot_json(series));
            emit(c, "decomposition.json", decomposition_json(series));
        } else if (*tests_cmd) {
            emit(c, "tests.json", tests_json(series, split.train));
        } else if (*ets_cmd) {
            emit(c, "ets.json", ets_json(analyse_ets(split), split));
        } else if (*sarima_cmd) {
            const auto a = analyse_sarima(split, parse_order(order_text, drift));
            write_text(c.output_dir / "sarima_coefficients.md", coefficient_markdown(a.fit));
            emit(c, "sarima_fit.json", sarima_json(a, split));
        } else if (*grid_sarima_cmd) {
            const auto grid = sarima::grid_search(split.train, sarima::tentative_influenza_candidates(), {}, c.workers);
            write_text(c.output_dir / "sarima_grid.json", sarima_grid_json(grid));
            emit(c, "sarima_grid.md", sarima_grid_markdown(grid));
        } else if (*train_cmd) {
            ModelEntry entry = neural_entry(model_name);
            for (const auto& m : c.models) {
                if (m.family == ModelFamily::neural && m.spec.kind == entry.spec.kind) entry = m;
            }
            if (epochs) entry.train.epochs = *epochs;
            RunReport r;
            r.config = c;
            r.config.n_runs = 1;
            r.config.models = {entry};
            r.test_start = split.test.start();
            r.test_actual.assign(split.test.values().begin(), split.test.values().end());
            ModelResult mr;
            mr.name = entry.name;
            mr.family = "neural";
            RunRecord rec = run_neural(split, entry, c.window_len, c.evaluation, c.scales, c.base_seed);
            mr.runs.push_back(rec);
            aggregate(mr);
            r.models.push_back(mr);
            if (!snapshot_path.empty()) {
                // Retrain deterministically to obtain the parameters for the snapshot.
                const auto scaled = split.scaler.transform(split.train.values());
                const auto data = make_windows(std::span<const double>(scaled), c.window_len);
                auto spec = entry.spec;
                spec.window_len = c.window_len;
                spec.dropout = entry.train.dropout_rate;
                auto model = nn::build_model(spec);
                auto cfg = entry.train;
                cfg.seed = c.base_seed;
                (void)nn::train(*model, data, cfg);
                nn::save_snapshot(*model, std::filesystem::path(snapshot_path));
            }
            emit(c, "train_" + nn::to_string(entry.spec.kind) + ".json", report_to_json(r));
        } else if (*grid_nn_cmd) {
            const ModelEntry entry = neural_entry(grid_model);
            GridSearchSpec spec = GridSearchSpec::paper();
            try {
                if (!units.empty()) spec.units = parse_list<std::size_t>(units, [](const std::string& s) { return std::stoul(s); });
                if (!activations.empty()) spec.activations = parse_list<nn::Activation>(activations, [](const std::string& s) { return nn::activation_from_string(s); });
                if (!lrs.empty()) spec.learning_rates = parse_list<double>(lrs, [](const std::string& s) { return std::stod(s); });
                if (!optimizers.empty()) spec.optimizers = parse_list<nn::OptimizerKind>(optimizers, [](const std::string& s) { return nn::optimizer_from_string(s); });
                if (!batch_sizes.empty()) spec.batch_sizes = parse_list<int>(batch_sizes, [](const std::string& s) { return std::stoi(s); });
            } catch (const std::exception& e) {
                throw ConfigError(std::string("grid-nn: ") + e.what());
            }
            nn::ModelPreset base{entry.spec, entry.train};
            if (grid_epochs) base.train.epochs = *grid_epochs;
            const auto scaled = split.scaler.transform(split.train.values());
            const auto data = make_windows(std::span<const double>(scaled), c.window_len);
            const auto res = grid_search_nn(base, spec, data, c.base_seed, c.workers);
            emit(c, "grid_nn_" + nn::to_string(entry.spec.kind) + ".json", grid_search_json(res));
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e);
    }
}
