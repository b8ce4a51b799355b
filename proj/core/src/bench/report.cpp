#include "tsf/bench/report.hpp"

#include "tsf/error.hpp"

#include <Eigen/Core>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unistd.h>

namespace tsf::bench {

using nlohmann::json;

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> number_or_null(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

json run_to_json(const RunRecord& r) {
    return {{"seed", r.seed},
            {"ok", r.ok},
            {"failure", r.failure},
            {"epochs", r.epochs},
            {"best_epoch", r.best_epoch},
            {"final_train_loss", optional_number(r.final_train_loss)},
            {"final_val_loss", optional_number(r.final_val_loss)},
            {"metrics", r.metrics},
            {"gmrae_floored", r.gmrae_floored},
            {"test_forecast", r.test_forecast},
            {"train_fitted", r.train_fitted},
            {"fitted_offset", r.fitted_offset}};
}

RunRecord run_from_json(const json& j) {
    RunRecord r;
    r.seed = j.at("seed").get<std::uint64_t>();
    r.ok = j.at("ok").get<bool>();
    r.failure = j.at("failure").get<std::string>();
    r.epochs = j.at("epochs").get<int>();
    r.best_epoch = j.at("best_epoch").get<int>();
    r.final_train_loss = number_or_null(j.at("final_train_loss"));
    r.final_val_loss = number_or_null(j.at("final_val_loss"));
    r.metrics = j.at("metrics").get<std::map<std::string, double>>();
    r.gmrae_floored = j.at("gmrae_floored").get<std::map<std::string, std::size_t>>();
    r.test_forecast = j.at("test_forecast").get<std::vector<double>>();
    r.train_fitted = j.at("train_fitted").get<std::vector<double>>();
    r.fitted_offset = j.at("fitted_offset").get<std::size_t>();
    return r;
}

json model_to_json(const ModelResult& m) {
    json summary = json::object();
    for (const auto& [k, s] : m.summary) summary[k] = {{"mean", s.mean}, {"se", optional_number(s.se)}, {"n", s.n}};
    json runs = json::array();
    for (const auto& r : m.runs) runs.push_back(run_to_json(r));
    return {{"name", m.name},     {"family", m.family}, {"metadata", m.metadata},
            {"failures", m.failures}, {"summary", summary}, {"runs", runs}};
}

ModelResult model_from_json(const json& j) {
    ModelResult m;
    m.name = j.at("name").get<std::string>();
    m.family = j.at("family").get<std::string>();
    m.metadata = j.at("metadata").get<std::map<std::string, std::string>>();
    m.failures = j.at("failures").get<std::size_t>();
    for (const auto& [k, s] : j.at("summary").items()) {
        m.summary[k] = MetricSummary{s.at("mean").get<double>(), number_or_null(s.at("se")), s.at("n").get<std::size_t>()};
    }
    for (const auto& r : j.at("runs")) m.runs.push_back(run_from_json(r));
    return m;
}

std::string format_number(double v) {
    char buf[64];
    const double a = std::fabs(v);
    if (a != 0.0 && (a >= 1e6 || a < 1e-3)) {
        std::snprintf(buf, sizeof buf, "%.4e", v);
    } else {
        std::snprintf(buf, sizeof buf, "%.4f", v);
    }
    return buf;
}

} // namespace

std::string format_mean_se(double mean, const std::optional<double>& se) {
    return se ? format_number(mean) + " ± " + format_number(*se) : format_number(mean);
}

std::string report_to_json(const RunReport& report) {
    json j;
    j["schema"] = "tsforecast.report/1";
    j["config"] = json::parse(config_to_json(report.config));
    j["test_start"] = report.test_start.to_string();
    j["test_actual"] = report.test_actual;
    j["models"] = json::array();
    for (const auto& m : report.models) j["models"].push_back(model_to_json(m));
    return j.dump(2) + "\n";
}

RunReport report_from_json(const std::string& text) {
    try {
        const json j = json::parse(text);
        if (j.at("schema").get<std::string>() != "tsforecast.report/1") throw DataError("unsupported report schema");
        RunReport r;
        r.config = parse_config(j.at("config").dump());
        r.test_start = YearMonth::parse(j.at("test_start").get<std::string>());
        r.test_actual = j.at("test_actual").get<std::vector<double>>();
        for (const auto& m : j.at("models")) r.models.push_back(model_from_json(m));
        return r;
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed report: ") + e.what());
    }
}

std::string report_to_markdown(const RunReport& report) {
    std::ostringstream out;
    out << "# Forecast comparison\n\n";
    out << "Test window: " << report.test_start.to_string() << " to "
        << report.test_start.plus(static_cast<long>(report.test_actual.size()) - 1).to_string() << " ("
        << (report.config.evaluation == Evaluation::recursive ? "recursive" : "teacher-forced")
        << " multi-step forecasts). Runs per stochastic model: " << report.config.n_runs
        << ", seeds from " << report.config.base_seed << ".\n";
    const std::pair<const char*, const char*> metrics_cols[4] = {
        {"mse", "Avg. MSE ± SE"}, {"mae", "Avg. MAE ± SE"}, {"gmrae", "Avg. GMRAE ± SE"}, {"theil_u1", "Avg. τ ± SE"}};
    for (const char* split : {"test", "train"}) {
        for (metrics::Scale scale : report.config.scales) {
            out << "\n## " << (std::string(split) == "test" ? "Test" : "Train") << " set, " << metrics::to_string(scale)
                << " scale\n\n| Model |";
            for (const auto& [_, title] : metrics_cols) out << ' ' << title << " |";
            out << " Runs |\n|---|";
            for (std::size_t i = 0; i < 4; ++i) out << "---|";
            out << "---|\n";
            for (const auto& m : report.models) {
                out << "| " << m.name << " |";
                for (const auto& [metric, _] : metrics_cols) {
                    const auto it = m.summary.find(metric_key(split, scale, metric));
                    out << ' ' << (it == m.summary.end() ? std::string("n/a") : format_mean_se(it->second.mean, it->second.se))
                        << " |";
                }
                out << ' ' << (m.runs.size() - m.failures) << '/' << m.runs.size() << " |\n";
            }
        }
    }
    bool any_failure = false;
    for (const auto& m : report.models) {
        for (const auto& r : m.runs) {
            if (r.ok) continue;
            if (!any_failure) out << "\n## Failed runs\n\n";
            any_failure = true;
            out << "- " << m.name << ", seed " << r.seed << ": " << r.failure << "\n";
        }
    }
    return out.str();
}

std::string environment_stamp_json() {
    json j;
#if defined(__clang__)
    j["compiler"] = std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
    j["compiler"] = std::string("gcc ") + __VERSION__;
#else
    j["compiler"] = "unknown";
#endif
#ifdef NDEBUG
    j["assertions"] = false;
#else
    j["assertions"] = true;
#endif
    j["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                 std::to_string(EIGEN_MINOR_VERSION);
    char host[256] = {};
    if (gethostname(host, sizeof host - 1) == 0) j["host"] = host;
    j["hardware_threads"] = std::thread::hardware_concurrency();
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char ts[32];
    std::strftime(ts, sizeof ts, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    j["timestamp_utc"] = ts;
    return j.dump(2) + "\n";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace tsf::bench
