#include "tsf/bench/config.hpp"

#include "tsf/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace tsf::bench {

using nlohmann::json;

namespace {

const std::vector<std::pair<nn::ModelKind, std::string>> kDisplayNames = {
    {nn::ModelKind::simple_rnn, "SimpleRNN"}, {nn::ModelKind::lstm, "LSTM"},   {nn::ModelKind::gru, "GRU"},
    {nn::ModelKind::bilstm, "BiLSTM"},        {nn::ModelKind::bigru, "BiGRU"}, {nn::ModelKind::transformer, "Transformer"}};

std::string display_name(nn::ModelKind k) {
    for (const auto& [kind, name] : kDisplayNames) {
        if (kind == k) return name;
    }
    return nn::to_string(k);
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items()) {
        if (!ok.contains(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

template <typename T>
T get(const json& obj, const char* key, const std::string& where) {
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

template <typename T>
void maybe(const json& obj, const char* key, const std::string& where, T& out) {
    if (obj.contains(key)) out = get<T>(obj, key, where);
}

json order_to_json(const sarima::SarimaOrder& o) {
    return {{"p", o.p}, {"d", o.d}, {"q", o.q}, {"P", o.P}, {"D", o.D}, {"Q", o.Q}, {"s", o.s}, {"drift", o.include_drift}};
}

sarima::SarimaOrder order_from_json(const json& j, const std::string& where) {
    check_keys(j, {"p", "d", "q", "P", "D", "Q", "s", "drift"}, where);
    sarima::SarimaOrder o;
    maybe(j, "p", where, o.p);
    maybe(j, "d", where, o.d);
    maybe(j, "q", where, o.q);
    maybe(j, "P", where, o.P);
    maybe(j, "D", where, o.D);
    maybe(j, "Q", where, o.Q);
    maybe(j, "s", where, o.s);
    maybe(j, "drift", where, o.include_drift);
    try {
        o.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where + ": " + e.what());
    }
    return o;
}

json hyper_to_json(const ModelEntry& m) {
    const auto& s = m.spec;
    const auto& t = m.train;
    json h = {{"epochs", t.epochs},
              {"batch_size", t.batch_size},
              {"learning_rate", t.learning_rate},
              {"optimizer", nn::to_string(t.optimizer)},
              {"dropout", t.dropout_rate},
              {"validation_fraction", t.validation_fraction},
              {"clip_norm", t.clip_norm}};
    if (s.kind == nn::ModelKind::transformer) {
        h["embed_dim"] = s.transformer.embed_dim;
        h["ff_dim"] = s.transformer.ff_dim;
        h["n_heads"] = s.transformer.n_heads;
        h["n_layers"] = s.transformer.n_layers;
        h["positional_encoding"] = s.transformer.positional_encoding;
        h["pooling"] = s.transformer.pooling == nn::Pooling::last ? "last" : "mean";
    } else {
        h["units"] = s.units;
        h["layers"] = s.layers;
        h["activation"] = nn::to_string(s.activation);
        h["head_loss"] = nn::to_string(s.head_loss);
    }
    return h;
}

void apply_hyper(const json& h, ModelEntry& m, const std::string& where) {
    auto& s = m.spec;
    auto& t = m.train;
    try {
        if (s.kind == nn::ModelKind::transformer) {
            check_keys(h, {"epochs", "batch_size", "learning_rate", "optimizer", "dropout", "validation_fraction", "clip_norm",
                           "embed_dim", "ff_dim", "n_heads", "n_layers", "positional_encoding", "pooling"},
                       where);
            maybe(h, "embed_dim", where, s.transformer.embed_dim);
            maybe(h, "ff_dim", where, s.transformer.ff_dim);
            maybe(h, "n_heads", where, s.transformer.n_heads);
            maybe(h, "n_layers", where, s.transformer.n_layers);
            maybe(h, "positional_encoding", where, s.transformer.positional_encoding);
            if (h.contains("pooling")) {
                const auto p = get<std::string>(h, "pooling", where);
                if (p != "last" && p != "mean") throw ConfigError(where + ".pooling: expected 'last' or 'mean'");
                s.transformer.pooling = p == "last" ? nn::Pooling::last : nn::Pooling::mean;
            }
        } else {
            check_keys(h, {"epochs", "batch_size", "learning_rate", "optimizer", "dropout", "validation_fraction", "clip_norm",
                           "units", "layers", "activation", "head_loss"},
                       where);
            maybe(h, "units", where, s.units);
            maybe(h, "layers", where, s.layers);
            if (h.contains("activation")) s.activation = nn::activation_from_string(get<std::string>(h, "activation", where));
            if (h.contains("head_loss")) s.head_loss = nn::head_loss_from_string(get<std::string>(h, "head_loss", where));
        }
        maybe(h, "epochs", where, t.epochs);
        maybe(h, "batch_size", where, t.batch_size);
        maybe(h, "learning_rate", where, t.learning_rate);
        if (h.contains("optimizer")) t.optimizer = nn::optimizer_from_string(get<std::string>(h, "optimizer", where));
        maybe(h, "dropout", where, t.dropout_rate);
        maybe(h, "validation_fraction", where, t.validation_fraction);
        maybe(h, "clip_norm", where, t.clip_norm);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where + ": " + e.what());
    }
    s.dropout = t.dropout_rate;
    s.transformer.dropout = t.dropout_rate;
}

json model_to_json(const ModelEntry& m) {
    json j = {{"name", m.name}};
    switch (m.family) {
    case ModelFamily::arima:
        j["type"] = "arima";
        j["order"] = m.order ? order_to_json(*m.order) : json("grid");
        j["candidates"] = json::array();
        for (const auto& o : m.candidates) j["candidates"].push_back(order_to_json(o));
        break;
    case ModelFamily::ets: j["type"] = "ets"; break;
    case ModelFamily::seasonal_naive: j["type"] = "seasonal_naive"; break;
    case ModelFamily::neural:
        j["type"] = nn::to_string(m.spec.kind);
        j["preset"] = m.paper_preset ? "paper" : "none";
        j["hyperparameters"] = hyper_to_json(m);
        break;
    }
    return j;
}

ModelEntry model_from_json(const json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    const auto type = get<std::string>(j, "type", where);
    ModelEntry m;
    try {
        m = default_model_entry(type);
    } catch (const std::invalid_argument&) {
        throw ConfigError(where + ".type: unknown model type '" + type + "'");
    }
    switch (m.family) {
    case ModelFamily::arima:
        check_keys(j, {"name", "type", "order", "candidates"}, where);
        if (j.contains("order")) {
            const auto& o = j.at("order");
            if (o.is_string()) {
                if (o.get<std::string>() != "grid") throw ConfigError(where + ".order: expected 'grid' or an order object");
                m.order.reset();
            } else {
                m.order = order_from_json(o, where + ".order");
            }
        }
        if (j.contains("candidates")) {
            const auto& c = j.at("candidates");
            if (c.is_string()) {
                if (c.get<std::string>() != "tentative") throw ConfigError(where + ".candidates: expected 'tentative' or a list");
                m.candidates = sarima::tentative_influenza_candidates();
            } else if (c.is_array()) {
                m.candidates.clear();
                for (std::size_t i = 0; i < c.size(); ++i) {
                    m.candidates.push_back(order_from_json(c[i], where + ".candidates[" + std::to_string(i) + "]"));
                }
            } else {
                throw ConfigError(where + ".candidates: expected 'tentative' or a list");
            }
        }
        if (!m.order && m.candidates.empty()) throw ConfigError(where + ": grid search needs at least one candidate");
        break;
    case ModelFamily::ets:
    case ModelFamily::seasonal_naive: check_keys(j, {"name", "type"}, where); break;
    case ModelFamily::neural: {
        check_keys(j, {"name", "type", "preset", "hyperparameters"}, where);
        std::string preset = "paper";
        maybe(j, "preset", where, preset);
        if (preset != "paper" && preset != "none") throw ConfigError(where + ".preset: expected 'paper' or 'none'");
        m.paper_preset = preset == "paper";
        if (!m.paper_preset) {
            const auto kind = m.spec.kind;
            m.spec = nn::ModelSpec{};
            m.spec.kind = kind;
            m.train = nn::TrainConfig{};
        }
        if (j.contains("hyperparameters")) apply_hyper(j.at("hyperparameters"), m, where + ".hyperparameters");
        break;
    }
    }
    maybe(j, "name", where, m.name);
    if (m.name.empty()) throw ConfigError(where + ".name: must not be empty");
    return m;
}

} // namespace

std::string to_string(ModelFamily f) {
    switch (f) {
    case ModelFamily::arima: return "arima";
    case ModelFamily::ets: return "ets";
    case ModelFamily::seasonal_naive: return "seasonal_naive";
    case ModelFamily::neural: return "neural";
    }
    return "neural";
}

ModelEntry default_model_entry(const std::string& type) {
    ModelEntry m;
    if (type == "arima") {
        m.name = "ARIMA";
        m.family = ModelFamily::arima;
        m.candidates = sarima::tentative_influenza_candidates();
    } else if (type == "ets") {
        m.name = "ETS";
        m.family = ModelFamily::ets;
    } else if (type == "seasonal_naive") {
        m.name = "Seasonal naive";
        m.family = ModelFamily::seasonal_naive;
    } else {
        const nn::ModelKind kind = nn::model_kind_from_string(type);
        const nn::ModelPreset p = nn::paper_preset(kind);
        m.name = display_name(kind);
        m.family = ModelFamily::neural;
        m.spec = p.spec;
        m.train = p.train;
    }
    return m;
}

void ExperimentConfig::validate() const {
    if (data_path.empty()) throw ConfigError("data.path must be set");
    if (period < 1) throw ConfigError("data.period must be >= 1");
    if (horizon < 1) throw ConfigError("split.horizon must be >= 1");
    if (window_len < 1) throw ConfigError("window_len must be >= 1");
    if (n_runs < 1) throw ConfigError("n_runs must be >= 1");
    if (models.empty()) throw ConfigError("models must not be empty");
    if (scales.empty()) throw ConfigError("scales must not be empty");
    if (workers < 1) throw ConfigError("workers must be >= 1");
    std::set<std::string> names;
    for (const auto& m : models) {
        if (!names.insert(m.name).second) throw ConfigError("duplicate model name '" + m.name + "'");
        if (m.family != ModelFamily::neural) continue;
        try {
            m.train.validate();
            if (m.spec.kind == nn::ModelKind::transformer) {
                auto t = m.spec.transformer;
                t.window_len = window_len;
                t.validate();
            } else {
                if (m.spec.units == 0 || m.spec.layers == 0) throw std::invalid_argument("units and layers must be positive");
            }
        } catch (const std::invalid_argument& e) {
            throw ConfigError("model '" + m.name + "': " + e.what());
        }
    }
}

ExperimentConfig default_config() {
    ExperimentConfig c;
    c.data_path = "data/influenza_a_monthly.csv";
    for (const char* t : {"arima", "ets", "simple_rnn", "lstm", "gru", "bilstm", "bigru", "transformer", "seasonal_naive"}) {
        c.models.push_back(default_model_entry(t));
    }
    return c;
}

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    check_keys(j, {"data", "split", "window_len", "models", "n_runs", "base_seed", "scales", "evaluation", "workers", "output_dir"},
               "config");
    ExperimentConfig c;
    if (!j.contains("data")) throw ConfigError("config: missing 'data'");
    const auto& d = j.at("data");
    check_keys(d, {"path", "value_column", "date_column", "period"}, "data");
    c.data_path = get<std::string>(d, "path", "data");
    maybe(d, "value_column", "data", c.value_column);
    maybe(d, "date_column", "data", c.date_column);
    maybe(d, "period", "data", c.period);
    if (j.contains("split")) {
        const auto& s = j.at("split");
        check_keys(s, {"train_end", "horizon"}, "split");
        if (s.contains("train_end")) {
            try {
                c.train_end = YearMonth::parse(get<std::string>(s, "train_end", "split"));
            } catch (const DataError& e) {
                throw ConfigError(std::string("split.train_end: ") + e.what());
            }
        }
        maybe(s, "horizon", "split", c.horizon);
    }
    maybe(j, "window_len", "config", c.window_len);
    maybe(j, "n_runs", "config", c.n_runs);
    maybe(j, "base_seed", "config", c.base_seed);
    maybe(j, "workers", "config", c.workers);
    if (j.contains("output_dir")) c.output_dir = get<std::string>(j, "output_dir", "config");
    if (j.contains("evaluation")) {
        const auto e = get<std::string>(j, "evaluation", "config");
        if (e == "recursive") {
            c.evaluation = Evaluation::recursive;
        } else if (e == "teacher_forced") {
            c.evaluation = Evaluation::teacher_forced;
        } else {
            throw ConfigError("evaluation: expected 'recursive' or 'teacher_forced'");
        }
    }
    if (j.contains("scales")) {
        c.scales.clear();
        for (const auto& s : get<std::vector<std::string>>(j, "scales", "config")) {
            if (s == "normalized") {
                c.scales.push_back(metrics::Scale::normalized);
            } else if (s == "original") {
                c.scales.push_back(metrics::Scale::original);
            } else {
                throw ConfigError("scales: unknown scale '" + s + "'");
            }
        }
    }
    if (!j.contains("models")) {
        c.models = default_config().models;
    } else {
        const auto& ms = j.at("models");
        if (!ms.is_array()) throw ConfigError("models: expected a list");
        for (std::size_t i = 0; i < ms.size(); ++i) c.models.push_back(model_from_json(ms[i], "models[" + std::to_string(i) + "]"));
    }
    for (auto& m : c.models) {
        m.spec.window_len = c.window_len;
        m.spec.transformer.window_len = c.window_len;
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string config_to_json(const ExperimentConfig& c) {
    json j;
    j["data"] = {{"path", c.data_path.generic_string()},
                 {"value_column", c.value_column},
                 {"date_column", c.date_column},
                 {"period", c.period}};
    j["split"] = {{"train_end", c.train_end.to_string()}, {"horizon", c.horizon}};
    j["window_len"] = c.window_len;
    j["n_runs"] = c.n_runs;
    j["base_seed"] = c.base_seed;
    j["workers"] = c.workers;
    j["output_dir"] = c.output_dir.generic_string();
    j["evaluation"] = c.evaluation == Evaluation::recursive ? "recursive" : "teacher_forced";
    j["scales"] = json::array();
    for (auto s : c.scales) j["scales"].push_back(metrics::to_string(s));
    j["models"] = json::array();
    for (const auto& m : c.models) j["models"].push_back(model_to_json(m));
    return j.dump(2) + "\n";
}

} // namespace tsf::bench
