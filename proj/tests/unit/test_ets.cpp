#include "test_support.hpp"

#include "tsf/ets.hpp"

#include <catch_amalgamated.hpp>

using namespace tsf;
using namespace tsf::ets;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const std::vector<double> kSeason = {5, 3, 1, -2, -4, -6, -7, -4, 0, 2, 4, 8};

std::vector<double> linear_seasonal(std::size_t n, double a, double b) {
    std::vector<double> y(n);
    for (std::size_t t = 0; t < n; ++t) y[t] = a + b * static_cast<double>(t) + kSeason[t % 12];
    return y;
}

std::vector<double> ar_seasonal(std::uint64_t seed, std::size_t n) {
    testing::Rng rng(seed);
    std::normal_distribution<double> e(0.0, 1.0);
    std::vector<double> y(n);
    double ar = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        ar = 0.6 * ar + e(rng);
        y[t] = 50.0 + 0.1 * static_cast<double>(t) + 3.0 * kSeason[t % 12] + ar;
    }
    return y;
}

} // namespace

TEST_CASE("exact linear-plus-seasonal series has zero residuals for any smoothing") {
    const auto y = linear_seasonal(60, 20.0, 0.7);
    HoltWintersState init;
    init.level = 20.0 + 0.7 * 11.0;
    init.slope = 0.7;
    init.seasonals = kSeason;
    testing::Rng rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const auto fit = hw_filter(std::span<const double>(y), 12, u(rng), u(rng), u(rng), init);
        REQUIRE(fit.residuals.size() == 48);
        for (double r : fit.residuals) REQUIRE(std::abs(r) < 1e-9);
    }
}

TEST_CASE("alpha 1, beta 0, gamma 1 tracks the deseasonalised observation") {
    testing::Rng rng(2);
    const auto y = testing::uniform_vector(rng, 40, 0.0, 100.0);
    const auto init = initial_state(std::span<const double>(y), 12);
    const auto fit = hw_filter(std::span<const double>(y), 12, 1.0, 0.0, 1.0, init);

    // Independent recursion: l_t = y_t - s_{t-m}, b constant, s_t = y_t - l_{t-1} - b.
    std::vector<double> s(init.seasonals);
    double level = init.level;
    for (std::size_t t = 12; t < y.size(); ++t) {
        const double s_old = s[(t - 12) % 12];
        const double expected_level = y[t] - s_old;
        REQUIRE_THAT(fit.level_path[t - 12], WithinAbs(expected_level, 1e-9));
        s[(t - 12) % 12] = y[t] - level - init.slope;
        level = expected_level;
    }
}

TEST_CASE("beta zero keeps the slope bitwise constant") {
    testing::Rng rng(3);
    const auto y = ar_seasonal(3, 96);
    const auto init = initial_state(std::span<const double>(y), 12);
    const auto fit = hw_filter(std::span<const double>(y), 12, 0.4, 0.0, 0.3, init);
    for (double b : fit.slope_path) REQUIRE(b == init.slope);
}

TEST_CASE("sse equals the sum of squared residuals") {
    const auto y = ar_seasonal(4, 96);
    const auto fit = hw_filter(std::span<const double>(y), 12, 0.5, 0.1, 0.2, initial_state(std::span<const double>(y), 12));
    double sse = 0.0;
    for (double r : fit.residuals) sse += r * r;
    CHECK_THAT(fit.sse, WithinRel(sse, 1e-9));
    CHECK(fit.fitted.size() == y.size() - 12);
    for (std::size_t i = 0; i < fit.fitted.size(); ++i) CHECK_THAT(fit.fitted[i] + fit.residuals[i], WithinAbs(y[i + 12], 1e-9));
}

TEST_CASE("initial state from two cycles") {
    const auto y = linear_seasonal(24, 10.0, 2.0);
    const auto st = initial_state(std::span<const double>(y), 12);
    CHECK_THAT(st.slope, WithinAbs(2.0, 1e-12));
    CHECK_THAT(st.level, WithinAbs(10.0 + 2.0 * 11.0, 1e-12));
    for (std::size_t j = 0; j < 12; ++j) CHECK_THAT(st.seasonals[j], WithinAbs(kSeason[j], 1e-12));
    CHECK_THROWS_AS(initial_state(std::span<const double>(y.data(), 23), 12), std::invalid_argument);
}

TEST_CASE("hw_filter rejects out-of-box parameters") {
    const auto y = ar_seasonal(5, 48);
    const auto init = initial_state(std::span<const double>(y), 12);
    CHECK_THROWS_AS(hw_filter(std::span<const double>(y), 12, 1.2, 0.1, 0.1, init), std::invalid_argument);
    CHECK_THROWS_AS(hw_filter(std::span<const double>(y), 12, 0.2, -0.1, 0.1, init), std::invalid_argument);
    HoltWintersState wrong = init;
    wrong.seasonals.pop_back();
    CHECK_THROWS_AS(hw_filter(std::span<const double>(y), 12, 0.2, 0.1, 0.1, wrong), std::invalid_argument);
}

TEST_CASE("fit on a noiseless series reaches zero SSE") {
    const TimeSeries ts({2001, 1}, linear_seasonal(72, 100.0, -0.5));
    const auto fit = fit_holt_winters(ts);
    CHECK(fit.sse < 1e-12);
}

TEST_CASE("fitted SSE beats 100 random parameter triples") {
    const auto y = ar_seasonal(6, 168);
    const TimeSeries ts({2001, 1}, y);
    const auto fit = fit_holt_winters(ts);
    CHECK(fit.params.alpha > 0.0);
    CHECK(fit.params.alpha < 1.0);
    CHECK(fit.params.beta >= 0.0);
    CHECK(fit.params.beta < 1.0);
    CHECK(fit.params.gamma > 0.0);
    CHECK(fit.params.gamma <= 1.0);
    CHECK_FALSE(fit.optimizer_trace.empty());
    const auto init = initial_state(std::span<const double>(y), 12);
    testing::Rng rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const double sse = hw_filter(std::span<const double>(y), 12, u(rng), u(rng), u(rng), init).sse;
        REQUIRE(fit.sse <= sse);
    }
}

TEST_CASE("fitting is deterministic") {
    const TimeSeries ts({2001, 1}, ar_seasonal(8, 120));
    const auto a = fit_holt_winters(ts);
    const auto b = fit_holt_winters(ts);
    CHECK(a.params.alpha == b.params.alpha);
    CHECK(a.params.beta == b.params.beta);
    CHECK(a.params.gamma == b.params.gamma);
    CHECK(a.sse == b.sse);
}

TEST_CASE("adding a constant shifts levels and leaves residuals unchanged") {
    const auto y = ar_seasonal(9, 120);
    std::vector<double> shifted(y);
    for (double& v : shifted) v += 1000.0;
    const auto a = fit_holt_winters(TimeSeries({2001, 1}, y));
    const auto b = fit_holt_winters(TimeSeries({2001, 1}, shifted));
    for (std::size_t i = 0; i < a.residuals.size(); ++i) {
        REQUIRE_THAT(b.residuals[i], WithinAbs(a.residuals[i], 1e-6));
        REQUIRE_THAT(b.level_path[i] - a.level_path[i], WithinAbs(1000.0, 1e-6));
    }
}

TEST_CASE("forecast examples") {
    HoltWintersState flat{100.0, 0.0, std::vector<double>(12, 0.0)};
    for (double f : hw_forecast(flat, 30)) CHECK(f == 100.0);

    HoltWintersState st{10.0, 1.0, kSeason};
    const auto f = hw_forecast(st, 13);
    CHECK(f[12] == 10.0 + 13.0 + kSeason[0]);
    CHECK(f[0] == 10.0 + 1.0 + kSeason[0]);
    CHECK_THROWS_AS(hw_forecast(st, 0), std::invalid_argument);
}

TEST_CASE("forecasts cycle with period m up to the slope") {
    const auto fit = fit_holt_winters(TimeSeries({2001, 1}, ar_seasonal(10, 120)));
    const auto f = hw_forecast(fit, 48);
    const double slope = fit.params.state.slope;
    for (std::size_t h = 0; h + 12 < f.size(); ++h) {
        REQUIRE_THAT(f[h + 12] - f[h], WithinAbs(12.0 * slope, 1e-9 * std::max(1.0, std::abs(f[h]))));
    }
}

TEST_CASE("final state continues the filter") {
    // Forecasting one step from the final state equals filtering one more observation's prediction.
    const auto y = ar_seasonal(11, 97);
    const auto init = initial_state(std::span<const double>(y), 12);
    const auto full = hw_filter(std::span<const double>(y), 12, 0.3, 0.05, 0.2, init);
    const auto head = hw_filter(std::span<const double>(y.data(), 96), 12, 0.3, 0.05, 0.2, init);
    CHECK_THAT(hw_forecast(head, 1)[0], WithinAbs(full.fitted.back(), 1e-9));
}
