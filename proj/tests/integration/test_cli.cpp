#include "test_support.hpp"

#include "tsf/bench/report.hpp"

#include <catch_amalgamated.hpp>
#include <json.hpp>

#include <cstdio>
#include <sys/wait.h>

using namespace tsf;
using Catch::Matchers::ContainsSubstring;
using nlohmann::json;

namespace {

struct Outcome {
    int code = -1;
    std::string out;
    std::string err;
};

Outcome run(const std::string& args, const std::filesystem::path& scratch) {
    const auto err_path = scratch / "stderr.txt";
    const std::string cmd = std::string("'") + TSF_CLI_PATH + "' " + args + " 2>'" + err_path.string() + "'";
    Outcome o;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) o.out.append(buf, n);
    const int status = pclose(pipe);
    o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    o.err = bench::read_text(err_path);
    return o;
}

class CliFixture {
public:
    CliFixture() : dir_("cli") {
        csv_ = dir_.path() / "series.csv";
        testing::write_series_csv(csv_, testing::synthetic_influenza(77));
    }
    std::string base() const { return "--data '" + csv_.string() + "' --out '" + (dir_.path() / "out").string() + "' "; }
    Outcome operator()(const std::string& args) const { return run(base() + args, dir_.path()); }
    const std::filesystem::path& dir() const { return dir_.path(); }
    std::filesystem::path out(const std::string& name) const { return dir_.path() / "out" / name; }

private:
    testing::TempDir dir_;
    std::filesystem::path csv_;
};

} // namespace

TEST_CASE("help and usage errors") {
    testing::TempDir dir("cli_usage");
    const auto help = run("--help", dir.path());
    CHECK(help.code == 0);
    for (const char* sub : {"ingest", "decompose", "tests", "fit-ets", "fit-sarima", "grid-sarima", "train", "grid-nn",
                            "benchmark", "report"}) {
        CHECK_THAT(help.out, ContainsSubstring(sub));
    }
    CHECK(run("", dir.path()).code == 1);
    CHECK(run("frobnicate", dir.path()).code == 1);
    CHECK(run("fit-sarima", dir.path()).code == 1);
    CHECK(run("--workers 0 ingest", dir.path()).code == 1);
}

TEST_CASE("analysis subcommands write JSON artifacts") {
    const CliFixture cli;
    const auto ingest = cli("ingest");
    REQUIRE(ingest.code == 0);
    const auto j = json::parse(ingest.out);
    CHECK(j.at("n") == 180);
    CHECK(j.at("train").at("end") == "2022-12");
    CHECK(bench::read_text(cli.out("ingest.json")) == ingest.out);

    CHECK(cli("decompose").code == 0);
    CHECK(std::filesystem::exists(cli.out("season_plot.json")));
    const auto tests = cli("tests");
    REQUIRE(tests.code == 0);
    CHECK(json::parse(tests.out).contains("kpss_levels"));
    const auto ets = cli("fit-ets");
    REQUIRE(ets.code == 0);
    CHECK(json::parse(ets.out).at("forecast").size() == 12);

    const auto sarima = cli("fit-sarima --order 0,1,1,0,0,1");
    REQUIRE(sarima.code == 0);
    CHECK(json::parse(sarima.out).at("order").at("label") == "ARIMA(0,1,1)(0,0,1)[12]");
    CHECK_THAT(bench::read_text(cli.out("sarima_coefficients.md")), ContainsSubstring("| Coefficient |"));
    CHECK(cli("fit-sarima --order 0,1,x,0,0,1").code == 1);
    CHECK(cli("fit-sarima --order 0,1,9,0,0,1").code == 1);

    const auto grid = cli("grid-sarima");
    REQUIRE(grid.code == 0);
    CHECK_THAT(grid.out, ContainsSubstring("| Rank | Model | AIC |"));
    const auto gj = json::parse(bench::read_text(cli.out("sarima_grid.json")));
    CHECK(gj.at("ranked").size() + gj.at("failures").size() == 20);
}

TEST_CASE("training, snapshots and neural grid search") {
    const CliFixture cli;
    const auto snap = cli.dir() / "gru.snap";
    const auto train = cli("--seed 5 train --model gru --epochs 2 --snapshot '" + snap.string() + "'");
    REQUIRE(train.code == 0);
    const auto r = bench::report_from_json(train.out);
    REQUIRE(r.models.size() == 1);
    CHECK(r.models[0].runs[0].seed == 5);
    CHECK(r.models[0].runs[0].epochs == 2);
    CHECK(bench::read_text(snap).rfind("TSFSNAP 1\n", 0) == 0);
    CHECK(cli("train --model ets").code == 1);
    CHECK(cli("train --model nope").code == 1);

    const auto g = cli("grid-nn --model lstm --units 2,3 --activations tanh --learning-rates 0.01 --optimizers adam "
                       "--batch-sizes 32 --epochs 1");
    REQUIRE(g.code == 0);
    const auto gj = json::parse(g.out);
    CHECK(gj.at("trials").size() == 2);
    CHECK(gj.contains("best"));
    CHECK(cli("grid-nn --model lstm --activations swish --epochs 1").code == 1);
}

TEST_CASE("benchmark and report round trip, with exit codes per failure class") {
    const CliFixture cli;
    const auto cfg = cli.dir() / "config.json";
    bench::write_text(cfg, R"({"data": {"path": "unused.csv"}, "n_runs": 2, "models": [
        {"type": "ets"}, {"type": "seasonal_naive"},
        {"type": "gru", "preset": "none", "hyperparameters": {"units": 4, "layers": 1, "epochs": 2}}]})");
    const auto b = cli("--config '" + cfg.string() + "' benchmark");
    REQUIRE(b.code == 0);
    CHECK_THAT(b.out, ContainsSubstring("| GRU |"));
    CHECK_THAT(b.err, ContainsSubstring("artifacts"));
    const auto md = bench::read_text(cli.out("report.md"));
    CHECK(b.out == md);

    const auto rerender = run("--out '" + (cli.dir() / "again").string() + "' report --input '" +
                                  cli.out("report.json").string() + "'",
                              cli.dir());
    REQUIRE(rerender.code == 0);
    CHECK(rerender.out == md);
    CHECK(bench::read_text(cli.dir() / "again" / "report.json") == bench::read_text(cli.out("report.json")));

    // Bad config file content: configuration error.
    const auto bad = cli.dir() / "bad.json";
    bench::write_text(bad, R"({"data": {"path": "x.csv"}, "n_runs": -1})");
    const auto c1 = run("--config '" + bad.string() + "' ingest", cli.dir());
    CHECK(c1.code == 1);
    CHECK_THAT(c1.err, ContainsSubstring("n_runs"));

    // Missing data: data error, and the pipeline leaves its error log.
    const auto missing_out = cli.dir() / "missing_out";
    const auto c2 = run("--data '" + (cli.dir() / "nope.csv").string() + "' --out '" + missing_out.string() +
                            "' --config '" + cfg.string() + "' benchmark",
                        cli.dir());
    CHECK(c2.code == 2);
    CHECK(std::filesystem::exists(missing_out / "error.log"));

    // A report that is not a report: data error.
    const auto junk = cli.dir() / "junk.json";
    bench::write_text(junk, "[1, 2, 3]");
    CHECK(run("report --input '" + junk.string() + "'", cli.dir()).code == 2);
}
