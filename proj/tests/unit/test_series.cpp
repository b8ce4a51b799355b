#include "test_support.hpp"

#include "tsf/error.hpp"
#include "tsf/series.hpp"

#include <catch_amalgamated.hpp>

#include <fstream>

using namespace tsf;
using tsf::testing::TempDir;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::filesystem::path write_csv(const TempDir& dir, const std::string& body) {
    const auto p = dir.path() / "series.csv";
    std::ofstream(p) << body;
    return p;
}

} // namespace

TEST_CASE("YearMonth parses both date forms and orders chronologically") {
    CHECK(YearMonth::parse("2009-01") == YearMonth{2009, 1});
    CHECK(YearMonth::parse("2023-12-31") == YearMonth{2023, 12});
    CHECK(YearMonth{2009, 12}.plus(1) == YearMonth{2010, 1});
    CHECK(YearMonth{2010, 1} > YearMonth{2009, 12});
    CHECK(YearMonth{2022, 2}.to_string() == "2022-02");
    CHECK_THROWS_AS(YearMonth::parse("2009/01"), DataError);
    CHECK_THROWS_AS(YearMonth::parse("2009-13"), DataError);
    CHECK_THROWS_AS(YearMonth::parse("abcd-01"), DataError);
}

TEST_CASE("load_csv reads a three-row file") {
    TempDir dir("series");
    const auto p = write_csv(dir, "date,value\n2009-01,5\n2009-02,7\n2009-03,6\n");
    const TimeSeries ts = load_csv(p, "value", "date");
    CHECK(ts.start() == YearMonth{2009, 1});
    REQUIRE(ts.size() == 3);
    CHECK(ts[0] == 5.0);
    CHECK(ts[1] == 7.0);
    CHECK(ts[2] == 6.0);
}

TEST_CASE("load_csv sorts rows, picks named columns and ignores extra ones") {
    TempDir dir("series");
    const auto p = write_csv(dir, "entity,cases,month\nA,3,2009-03-01\nA,1,2009-01-01\nA,2,2009-02-01\n");
    const TimeSeries ts = load_csv(p, "cases", "month");
    CHECK(ts.start() == YearMonth{2009, 1});
    CHECK(std::vector<double>(ts.values().begin(), ts.values().end()) == std::vector<double>{1, 2, 3});
}

TEST_CASE("load_csv reports the missing month of a gap") {
    TempDir dir("series");
    const auto p = write_csv(dir, "date,value\n2009-01,5\n2009-03,6\n");
    CHECK_THROWS_WITH(load_csv(p, "value", "date"), ContainsSubstring("2009-02"));
}

TEST_CASE("load_csv rejects malformed input") {
    TempDir dir("series");
    SECTION("missing file") { CHECK_THROWS_AS(load_csv(dir.path() / "nope.csv", "value", "date"), DataError); }
    SECTION("duplicate month") {
        const auto p = write_csv(dir, "date,value\n2009-01,5\n2009-01,6\n");
        CHECK_THROWS_WITH(load_csv(p, "value", "date"), ContainsSubstring("duplicate"));
    }
    SECTION("bad date") {
        const auto p = write_csv(dir, "date,value\nJan 2009,5\n");
        CHECK_THROWS_AS(load_csv(p, "value", "date"), DataError);
    }
    SECTION("negative value") {
        const auto p = write_csv(dir, "date,value\n2009-01,-5\n");
        CHECK_THROWS_AS(load_csv(p, "value", "date"), DataError);
    }
    SECTION("unknown column") {
        const auto p = write_csv(dir, "date,value\n2009-01,5\n");
        CHECK_THROWS_WITH(load_csv(p, "cases", "date"), ContainsSubstring("cases"));
    }
}

TEST_CASE("train_test_split boundaries") {
    std::vector<double> v(180);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
    const TimeSeries ts({2009, 1}, v);
    const auto [train, test] = train_test_split(ts, {2022, 12});
    CHECK(train.size() == 168);
    CHECK(test.size() == 12);
    CHECK(test.start() == YearMonth{2023, 1});
    CHECK(test[0] == 168.0);

    CHECK_THROWS_AS(train_test_split(ts, ts.last()), std::invalid_argument);
    CHECK_THROWS_AS(train_test_split(ts, {2008, 12}), std::invalid_argument);

    const TimeSeries small({2000, 1}, std::vector<double>(24, 1.0));
    const auto [a, b] = train_test_split(small, {2000, 12});
    CHECK(a.size() == 12);
    CHECK(b.size() == 12);
}

TEST_CASE("split lengths always sum to the original") {
    testing::Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng() % 300;
        const TimeSeries ts({1990 + static_cast<int>(rng() % 30), 1 + static_cast<int>(rng() % 12)},
                            testing::uniform_vector(rng, n));
        const long cut = static_cast<long>(rng() % (n - 1));
        const auto [a, b] = train_test_split(ts, ts.month_at(static_cast<std::size_t>(cut)));
        REQUIRE(a.size() + b.size() == n);
        REQUIRE(b.start() == a.last().plus(1));
    }
}

TEST_CASE("MinMaxScaler maps the training range onto [0, 1]") {
    const std::vector<double> v{0, 5, 10};
    const auto s = MinMaxScaler::fit(std::span<const double>(v));
    const auto z = s.transform(std::span<const double>(v));
    CHECK(z == std::vector<double>{0.0, 0.5, 1.0});

    // A held-out value above the training maximum: (15 - 0) / (10 - 0).
    CHECK(s.transform(15.0) == 1.5);
    CHECK(s.transform(-2.0) == -0.2);

    const std::vector<double> flat{3, 3, 3};
    CHECK_THROWS_AS(MinMaxScaler::fit(std::span<const double>(flat)), std::invalid_argument);
}

TEST_CASE("scaler round trip is an identity to 1e-12 relative") {
    testing::Rng rng(5);
    for (int trial = 0; trial < 500; ++trial) {
        const auto train = testing::uniform_vector(rng, 20, -1e5, 1e5);
        const auto s = MinMaxScaler::fit(std::span<const double>(train));
        const auto x = testing::uniform_vector(rng, 50, -3e5, 3e5);
        const auto back = s.inverse_transform(std::span<const double>(s.transform(std::span<const double>(x))));
        for (std::size_t i = 0; i < x.size(); ++i) {
            REQUIRE(std::abs(back[i] - x[i]) <= 1e-12 * std::max(std::abs(x[i]), s.hi() - s.lo()));
        }
    }
}

TEST_CASE("make_windows enumerates overlapping windows") {
    const std::vector<double> v{1, 2, 3, 4};
    const auto w = make_windows(std::span<const double>(v), 2);
    REQUIRE(w.size() == 2);
    CHECK(w.inputs[0] == std::vector<double>{1, 2});
    CHECK(w.inputs[1] == std::vector<double>{2, 3});
    CHECK(w.targets == std::vector<double>{3, 4});

    const std::vector<double> train(168, 0.5);
    CHECK(make_windows(std::span<const double>(train), 12).size() == 156);
    CHECK_THROWS_AS(make_windows(std::span<const double>(v), 4), std::invalid_argument);
    CHECK_THROWS_AS(make_windows(std::span<const double>(v), 0), std::invalid_argument);
}

TEST_CASE("first window followed by all targets reproduces the series") {
    testing::Rng rng(9);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 3 + rng() % 100;
        const std::size_t L = 1 + rng() % (n - 1);
        const auto v = testing::normal_vector(rng, n);
        const auto w = make_windows(std::span<const double>(v), L);
        REQUIRE(w.size() == n - L);
        std::vector<double> rebuilt = w.inputs[0];
        rebuilt.insert(rebuilt.end(), w.targets.begin(), w.targets.end());
        REQUIRE(rebuilt == v);
        for (std::size_t i = 0; i < w.size(); ++i) {
            for (std::size_t j = 0; j < L; ++j) REQUIRE(w.inputs[i][j] == v[i + j]);
        }
    }
}

TEST_CASE("difference examples") {
    const std::vector<double> sq{1, 4, 9, 16};
    CHECK(difference(std::span<const double>(sq), 1, 0, 12) == std::vector<double>{3, 5, 7});
    CHECK(difference(std::span<const double>(sq), 0, 0, 12) == sq);

    testing::Rng rng(3);
    const auto y = testing::normal_vector(rng, 40);
    const auto sd = difference(std::span<const double>(y), 0, 1, 12);
    REQUIRE(sd.size() == 28);
    for (std::size_t t = 12; t < y.size(); ++t) CHECK(sd[t - 12] == y[t] - y[t - 12]);

    const TimeSeries ts({2009, 1}, y);
    const auto dts = difference(ts, 1, 1, 12);
    CHECK(dts.size() == 27);
    CHECK(dts.start() == YearMonth{2010, 2});
    CHECK_THROWS_AS(difference(std::span<const double>(sq), 0, 1, 4), std::invalid_argument);
}

TEST_CASE("differencing polynomial of (1-B)(1-B^4)") {
    CHECK(differencing_polynomial(1, 1, 4) == std::vector<double>{1, -1, 0, 0, -1, 1});
    CHECK(differencing_polynomial(2, 0, 12) == std::vector<double>{1, -2, 1});
}

TEST_CASE("integrate inverts difference") {
    const std::vector<double> sq{1, 4, 9, 16};
    const auto d = difference(std::span<const double>(sq), 1, 0, 12);
    const std::vector<double> piv{1};
    CHECK(integrate(std::span<const double>(d), std::span<const double>(piv), 1, 0, 12) == sq);

    const std::vector<double> empty;
    const std::vector<double> pivots{3, 1, 4, 1, 5};
    CHECK(integrate(std::span<const double>(empty), std::span<const double>(pivots), 1, 1, 4) == pivots);
    CHECK_THROWS_AS(integrate(std::span<const double>(d), std::span<const double>(pivots), 1, 0, 12),
                    std::invalid_argument);
}

TEST_CASE("difference/integrate round trip for d <= 2, D <= 1, s in {4, 12}") {
    testing::Rng rng(21);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 40 + rng() % 100;
        const auto y = testing::random_series(rng, n);
        for (int d = 0; d <= 2; ++d) {
            for (int D = 0; D <= 1; ++D) {
                for (int s : {4, 12}) {
                    const auto k = static_cast<std::size_t>(d + D * s);
                    const auto diffed = difference(std::span<const double>(y), d, D, s);
                    REQUIRE(diffed.size() == n - k);
                    const std::span<const double> piv(y.data(), k);
                    const auto back = integrate(std::span<const double>(diffed), piv, d, D, s);
                    REQUIRE(back.size() == n);
                    for (std::size_t i = 0; i < n; ++i) {
                        REQUIRE(std::abs(back[i] - y[i]) <= 1e-9 * std::max(1.0, std::abs(y[i])));
                    }
                }
            }
        }
    }
}

TEST_CASE("integer series round trip exactly") {
    testing::Rng rng(4);
    std::vector<double> y(60);
    for (double& v : y) v = static_cast<double>(rng() % 100000);
    const auto diffed = difference(std::span<const double>(y), 1, 1, 12);
    const auto back = integrate(std::span<const double>(diffed), std::span<const double>(y.data(), 13), 1, 1, 12);
    CHECK(back == y);
}

TEST_CASE("descriptive statistics use type-7 quantiles") {
    const std::vector<double> v{1, 2, 3, 4, 5};
    const auto s = descriptive_stats(std::span<const double>(v));
    CHECK(s.min == 1);
    CHECK(s.median == 3);
    CHECK(s.mean == 3);
    CHECK(s.max == 5);
    CHECK(s.q1 == 2);
    CHECK(s.q3 == 4);

    // Type 7 on {1, 2, 3, 4}: h = (n - 1) p, so q1 = 1 + 0.75 = 1.75.
    const std::vector<double> four{4, 1, 3, 2};
    CHECK_THAT(quantile_type7(std::span<const double>(four), 0.25), WithinAbs(1.75, 1e-15));
    CHECK_THAT(quantile_type7(std::span<const double>(four), 0.5), WithinAbs(2.5, 1e-15));
    CHECK_THROWS_AS(descriptive_stats(std::span<const double>()), std::invalid_argument);
}

TEST_CASE("TimeSeries invariants") {
    CHECK_THROWS_AS(TimeSeries({2009, 1}, {}), std::invalid_argument);
    CHECK_THROWS_AS(TimeSeries({2009, 1}, {1.0}, 0), std::invalid_argument);
    const TimeSeries ts({2009, 11}, {1, 2, 3});
    CHECK(ts.last() == YearMonth{2010, 1});
    CHECK(ts.index_of({2010, 1}) == 2);
    CHECK(ts.index_of({2010, 2}) == -1);
    CHECK_THAT(ts.with_values({4, 5, 6})[2], WithinRel(6.0));
}
