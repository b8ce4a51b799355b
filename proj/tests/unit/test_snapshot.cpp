#include "test_support.hpp"

#include "tsf/error.hpp"
#include "tsf/nn/presets.hpp"
#include "tsf/nn/snapshot.hpp"

#include <catch_amalgamated.hpp>

#include <sstream>

using namespace tsf;
using namespace tsf::nn;

namespace {

ModelSpec small(ModelKind kind) {
    ModelSpec s;
    s.kind = kind;
    s.units = 3;
    s.layers = 2;
    s.window_len = 4;
    s.transformer.embed_dim = 4;
    s.transformer.ff_dim = 6;
    s.transformer.n_heads = 2;
    s.transformer.n_layers = 1;
    return s;
}

} // namespace

TEST_CASE("snapshots round trip every model kind bitwise") {
    testing::Rng data(1);
    const Matrix w = testing::random_matrix(data, 5, 4);
    for (auto kind : all_model_kinds()) {
        auto a = build_model(small(kind));
        auto b = build_model(small(kind));
        Rng rng(7);
        a->init(rng);
        std::stringstream buf;
        save_snapshot(*a, buf);
        load_snapshot(*b, buf);
        const auto pa = std::as_const(*a).parameters();
        const auto pb = std::as_const(*b).parameters();
        REQUIRE(pa.size() == pb.size());
        for (std::size_t i = 0; i < pa.size(); ++i) REQUIRE(pa[i]->value == pb[i]->value);
        CHECK(a->predict(w) == b->predict(w));
    }
}

TEST_CASE("snapshot header describes the model") {
    auto m = build_model(small(ModelKind::gru));
    std::stringstream buf;
    save_snapshot(*m, buf);
    const std::string text = buf.str();
    CHECK(text.rfind("TSFSNAP 1\n", 0) == 0);
    const auto h = read_snapshot_header(buf);
    CHECK(h.version == kSnapshotVersion);
    CHECK(h.kind == "gru");
    CHECK(h.metadata.at("units") == "3");
    const auto params = std::as_const(*m).parameters();
    REQUIRE(h.parameters.size() == params.size());
    std::size_t doubles = 0;
    for (std::size_t i = 0; i < params.size(); ++i) {
        CHECK(h.parameters[i].name == params[i]->name);
        CHECK(h.parameters[i].shape == params[i]->value.shape());
        doubles += params[i]->value.size();
    }
    // Payload is exactly the parameter values after the two header lines.
    const auto second_newline = text.find('\n', text.find('\n') + 1);
    CHECK(text.size() - second_newline - 1 == doubles * sizeof(double));
}

TEST_CASE("snapshot files") {
    testing::TempDir dir("snap");
    auto a = build_model(small(ModelKind::lstm));
    Rng rng(3);
    a->init(rng);
    const auto path = dir.path() / "m.snap";
    save_snapshot(*a, path);
    auto b = build_model(small(ModelKind::lstm));
    load_snapshot(*b, path);
    CHECK(std::as_const(*a).parameters()[0]->value == std::as_const(*b).parameters()[0]->value);
    CHECK_THROWS_AS(load_snapshot(*b, dir.path() / "missing.snap"), DataError);
}

TEST_CASE("mismatched or damaged snapshots are rejected") {
    auto lstm = build_model(small(ModelKind::lstm));
    auto source = build_model(small(ModelKind::lstm));
    Rng r1(1), r2(2);
    lstm->init(r1);
    source->init(r2);
    std::stringstream buf;
    save_snapshot(*source, buf);
    const std::string good = buf.str();

    auto gru = build_model(small(ModelKind::gru));
    std::stringstream s1(good);
    CHECK_THROWS_AS(load_snapshot(*gru, s1), DataError);

    auto wider = small(ModelKind::lstm);
    wider.units = 4;
    auto other = build_model(wider);
    std::stringstream s2(good);
    CHECK_THROWS_AS(load_snapshot(*other, s2), DataError);

    auto deeper = small(ModelKind::lstm);
    deeper.layers = 3;
    auto deep = build_model(deeper);
    std::stringstream s3(good);
    CHECK_THROWS_AS(load_snapshot(*deep, s3), DataError);

    // A rejected body leaves the target's parameters as they were.
    std::vector<Tensor> before;
    for (const Parameter* p : lstm->parameters()) before.push_back(p->value);
    const auto unchanged = [&] {
        const auto params = lstm->parameters();
        for (std::size_t i = 0; i < params.size(); ++i) {
            if (!(params[i]->value == before[i])) return false;
        }
        return true;
    };
    std::stringstream truncated(good.substr(0, good.size() - 5));
    CHECK_THROWS_AS(load_snapshot(*lstm, truncated), DataError);
    CHECK(unchanged());
    std::stringstream trailing(good + "x");
    CHECK_THROWS_AS(load_snapshot(*lstm, trailing), DataError);
    CHECK(unchanged());

    std::stringstream magic("NOTASNAP 1\n{}\n");
    CHECK_THROWS_AS(load_snapshot(*lstm, magic), DataError);

    std::stringstream version("TSFSNAP 99\n{}\n");
    CHECK_THROWS_AS(load_snapshot(*lstm, version), DataError);

    std::stringstream header("TSFSNAP 1\n{not json\n");
    CHECK_THROWS_AS(load_snapshot(*lstm, header), DataError);
}
