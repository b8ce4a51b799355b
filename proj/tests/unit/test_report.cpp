#include "test_support.hpp"

#include "tsf/bench/report.hpp"
#include "tsf/error.hpp"

#include <catch_amalgamated.hpp>
#include <json.hpp>

using namespace tsf;
using namespace tsf::bench;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

RunRecord random_run(testing::Rng& rng, std::uint64_t seed) {
    std::normal_distribution<double> z(0.0, 1.0);
    RunRecord r;
    r.seed = seed;
    r.epochs = 50;
    r.best_epoch = static_cast<int>(rng() % 50);
    r.final_train_loss = std::abs(z(rng)) * 1e-3;
    r.final_val_loss = std::abs(z(rng)) * 1e-2;
    for (const char* split : {"train", "test"}) {
        for (auto sc : {metrics::Scale::normalized, metrics::Scale::original}) {
            for (const char* m : kMetricNames) {
                // Awkward magnitudes exercise the shortest round-trip number printer.
                r.metrics[metric_key(split, sc, m)] = std::exp(4.0 * z(rng)) / 3.0;
            }
            r.gmrae_floored[metric_key(split, sc, "gmrae")] = rng() % 3;
        }
    }
    r.test_forecast = testing::normal_vector(rng, 12, 1000.0, 300.0);
    r.train_fitted = testing::normal_vector(rng, 156, 1000.0, 300.0);
    r.fitted_offset = 12;
    return r;
}

RunReport random_report(std::uint64_t seed) {
    testing::Rng rng(seed);
    RunReport rep;
    rep.config = default_config();
    rep.config.data_path = "data/x.csv";
    rep.test_start = {2023, 1};
    rep.test_actual = testing::normal_vector(rng, 12, 2000.0, 500.0);
    for (const char* name : {"LSTM", "ETS"}) {
        ModelResult m;
        m.name = name;
        m.family = name == std::string("ETS") ? "ets" : "neural";
        m.metadata = {{"units", "64"}};
        const int n = name == std::string("ETS") ? 1 : 4;
        for (int i = 0; i < n; ++i) m.runs.push_back(random_run(rng, 42 + static_cast<std::uint64_t>(i)));
        if (n > 1) {
            m.runs[2].ok = false;
            m.runs[2].failure = "non-finite training loss at epoch 3, batch 1";
            m.runs[2].metrics.clear();
        }
        aggregate(m);
        rep.models.push_back(std::move(m));
    }
    return rep;
}

} // namespace

TEST_CASE("report JSON round trips byte for byte") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto rep = random_report(seed);
        const std::string text = report_to_json(rep);
        const auto back = report_from_json(text);
        REQUIRE(report_to_json(back) == text);
        REQUIRE(back.models.size() == 2);
        REQUIRE(back.models[0].runs[1].metrics == rep.models[0].runs[1].metrics);
        REQUIRE(back.models[0].runs[0].train_fitted == rep.models[0].runs[0].train_fitted);
        REQUIRE(back.models[0].runs[0].final_val_loss == rep.models[0].runs[0].final_val_loss);
        REQUIRE_FALSE(back.models[0].runs[2].ok);
        REQUIRE(back.test_start == YearMonth{2023, 1});
    }
    const auto text = report_to_json(random_report(1));
    CHECK(text.back() == '\n');
    const auto j = nlohmann::json::parse(text);
    CHECK(j.at("schema") == "tsforecast.report/1");
    CHECK(text.find("timestamp") == std::string::npos);
}

TEST_CASE("stored summaries agree with the stored runs") {
    const auto rep = report_from_json(report_to_json(random_report(3)));
    for (const auto& m : rep.models) {
        for (const auto& [key, s] : m.summary) {
            std::vector<double> vals;
            for (const auto& r : m.runs) {
                if (r.ok) vals.push_back(r.metrics.at(key));
            }
            double sum = 0.0;
            for (double v : vals) sum += v;
            CHECK(s.n == vals.size());
            CHECK_THAT(s.mean, WithinAbs(sum / static_cast<double>(vals.size()), 1e-12 * std::max(1.0, std::abs(sum))));
            CHECK(s.se.has_value() == (vals.size() > 1));
        }
    }
    CHECK(rep.models[0].failures == 1);
    CHECK(rep.models[1].summary.at("test.original.mse").n == 1);
}

TEST_CASE("malformed reports are rejected") {
    CHECK_THROWS_AS(report_from_json("not json"), DataError);
    CHECK_THROWS_AS(report_from_json("{}"), DataError);
    auto j = nlohmann::json::parse(report_to_json(random_report(2)));
    j["schema"] = "tsforecast.report/0";
    CHECK_THROWS_AS(report_from_json(j.dump()), DataError);
    j["schema"] = "tsforecast.report/1";
    j["models"][0]["runs"][0].erase("seed");
    CHECK_THROWS_AS(report_from_json(j.dump()), DataError);
}

TEST_CASE("mean and standard error formatting") {
    CHECK(format_mean_se(0.0123, 0.0045) == "0.0123 ± 0.0045");
    CHECK(format_mean_se(1.5, std::nullopt) == "1.5000");
    CHECK(format_mean_se(2.5e7, 1.25e6) == "2.5000e+07 ± 1.2500e+06");
    CHECK(format_mean_se(0.0005, 0.0) == "5.0000e-04 ± 0.0000");
    CHECK(format_mean_se(-3.0, 0.25) == "-3.0000 ± 0.2500");
}

TEST_CASE("markdown tables") {
    const auto rep = random_report(4);
    const auto md = report_to_markdown(rep);
    CHECK_THAT(md, ContainsSubstring("| Model | Avg. MSE ± SE | Avg. MAE ± SE | Avg. GMRAE ± SE | Avg. τ ± SE | Runs |"));
    CHECK_THAT(md, ContainsSubstring("## Test set, normalized scale"));
    CHECK_THAT(md, ContainsSubstring("## Train set, original scale"));
    CHECK_THAT(md, ContainsSubstring("| LSTM |"));
    CHECK_THAT(md, ContainsSubstring(" 3/4 |"));
    CHECK_THAT(md, ContainsSubstring(" 1/1 |"));
    CHECK_THAT(md, ContainsSubstring("## Failed runs"));
    CHECK_THAT(md, ContainsSubstring("LSTM, seed 44: non-finite training loss"));
    const auto& s = rep.models[0].summary.at("test.original.mse");
    CHECK_THAT(md, ContainsSubstring(format_mean_se(s.mean, s.se)));
    CHECK(md == report_to_markdown(rep));
}

TEST_CASE("text files and environment stamp") {
    testing::TempDir dir("report");
    const auto path = dir.path() / "a" / "b" / "r.json";
    write_text(path, "hello\n");
    CHECK(read_text(path) == "hello\n");
    CHECK_THROWS_AS(read_text(dir.path() / "missing"), DataError);
    const auto env = nlohmann::json::parse(environment_stamp_json());
    CHECK(env.contains("compiler"));
    CHECK(env.contains("timestamp_utc"));
}
