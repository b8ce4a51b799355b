#include "test_support.hpp"

#include "tsf/metrics.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>

using namespace tsf::metrics;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
using V = std::vector<double>;
std::span<const double> sp(const V& v) { return {v.data(), v.size()}; }
} // namespace

TEST_CASE("MSE examples") {
    CHECK(mse(sp(V{1, 2, 3}), sp(V{1, 2, 3})) == 0.0);
    CHECK_THAT(mse(sp(V{1, 2, 3}), sp(V{1, 2, 5})), WithinAbs(4.0 / 3.0, 1e-15));
    CHECK_THROWS_AS(mse(sp(V{1, 2}), sp(V{1})), std::invalid_argument);
    CHECK_THROWS_AS(mse(sp(V{}), sp(V{})), std::invalid_argument);
}

TEST_CASE("MAE examples") {
    CHECK(mae(sp(V{1, 2, 3}), sp(V{1, 2, 3})) == 0.0);
    CHECK(mae(sp(V{1, 2, 3}), sp(V{0, 4, 3})) == 1.0);
    CHECK(mae(sp(V{1, -2, 3}), sp(V{0, 4, 3})) == mae(sp(V{-1, 2, -3}), sp(V{0, -4, -3})));
}

TEST_CASE("GMRAE examples") {
    const auto ones = gmrae(sp(V{3, -4, 5}), sp(V{0, 0, 0}));
    CHECK_THAT(ones.value, WithinAbs(1.0, 1e-15));
    CHECK(ones.floored_terms == 0);
    CHECK_THAT(gmrae(sp(V{2, 4}), sp(V{1, 2})).value, WithinAbs(0.5, 1e-15));

    const auto perfect = gmrae(sp(V{1, 2, 3}), sp(V{1, 2, 3}));
    CHECK(perfect.undefined);
    CHECK(perfect.floored_terms == 3);
    CHECK_THAT(perfect.value, WithinRel(kGmraeFloor, 1e-9));

    // One zero actual and one exact term are floored; the remaining term is kept.
    const auto mixed = gmrae(sp(V{0, 5, 4}), sp(V{1, 5, 2}));
    CHECK(mixed.floored_terms == 2);
    CHECK_FALSE(mixed.undefined);
    CHECK_THAT(mixed.value, WithinRel(std::cbrt(kGmraeFloor * kGmraeFloor * 0.5), 1e-9));
}

TEST_CASE("Theil U1 examples") {
    CHECK(theil_u1(sp(V{1, 2, 3}), sp(V{1, 2, 3})) == 0.0);
    CHECK_THAT(theil_u1(sp(V{1, -2, 3}), sp(V{-1, 2, -3})), WithinAbs(1.0, 1e-15));
    CHECK_THAT(theil_u1(sp(V{3, 4}), sp(V{0, 0})), WithinAbs(1.0, 1e-15));
    CHECK_THROWS_AS(theil_u1(sp(V{0, 0}), sp(V{0, 0})), std::invalid_argument);
}

TEST_CASE("evaluate bundles every metric") {
    const auto r = evaluate(sp(V{2, 4}), sp(V{1, 2}), Scale::normalized);
    CHECK(r.n == 2);
    CHECK(r.scale == Scale::normalized);
    CHECK_THAT(r.mse, WithinAbs(2.5, 1e-15));
    CHECK_THAT(r.mae, WithinAbs(1.5, 1e-15));
    CHECK_THAT(r.gmrae, WithinAbs(0.5, 1e-15));
    CHECK(to_string(Scale::original) == "original");
}

TEST_CASE("Theil U1 lies in [0, 1] on random pairs") {
    tsf::testing::Rng rng(1);
    std::uniform_int_distribution<int> len(1, 30);
    for (int trial = 0; trial < 10000; ++trial) {
        const auto n = static_cast<std::size_t>(len(rng));
        const auto a = tsf::testing::normal_vector(rng, n, 0.0, 1e3);
        const auto p = tsf::testing::normal_vector(rng, n, 0.0, 1e3);
        const double u = theil_u1(sp(a), sp(p));
        REQUIRE(u >= 0.0);
        REQUIRE(u <= 1.0);
    }
}

TEST_CASE("MAE squared never exceeds MSE") {
    tsf::testing::Rng rng(2);
    for (int trial = 0; trial < 2000; ++trial) {
        const auto a = tsf::testing::normal_vector(rng, 12);
        const auto p = tsf::testing::normal_vector(rng, 12);
        const double m = mae(sp(a), sp(p));
        REQUIRE(m * m <= mse(sp(a), sp(p)) * (1.0 + 1e-12));
    }
}

TEST_CASE("scale equivariance and invariance") {
    tsf::testing::Rng rng(3);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto a = tsf::testing::normal_vector(rng, 12, 5.0);
        const auto p = tsf::testing::normal_vector(rng, 12, 5.0);
        // Powers of two keep every product exact.
        const double c = std::ldexp(1.0, static_cast<int>(rng() % 40) - 20);
        V ca(a), cp(p);
        for (double& v : ca) v *= c;
        for (double& v : cp) v *= c;
        REQUIRE(mse(sp(ca), sp(cp)) == c * c * mse(sp(a), sp(p)));
        REQUIRE(mae(sp(ca), sp(cp)) == c * mae(sp(a), sp(p)));
        REQUIRE(gmrae(sp(ca), sp(cp)).value == gmrae(sp(a), sp(p)).value);
        REQUIRE(theil_u1(sp(ca), sp(cp)) == theil_u1(sp(a), sp(p)));

        // General positive factors agree to rounding.
        const double g = std::uniform_real_distribution<double>(0.01, 100.0)(rng);
        V ga(a), gp(p);
        for (double& v : ga) v *= g;
        for (double& v : gp) v *= g;
        REQUIRE_THAT(mse(sp(ga), sp(gp)), WithinRel(g * g * mse(sp(a), sp(p)), 1e-12));
        REQUIRE_THAT(mae(sp(ga), sp(gp)), WithinRel(g * mae(sp(a), sp(p)), 1e-12));
        // a*g - p*g cancels when a is close to p, so the ratio only agrees to a few ulps of |a|/|a-p|.
        REQUIRE_THAT(gmrae(sp(ga), sp(gp)).value, WithinRel(gmrae(sp(a), sp(p)).value, 1e-9));
        REQUIRE_THAT(theil_u1(sp(ga), sp(gp)), WithinRel(theil_u1(sp(a), sp(p)), 1e-12));
    }
}

TEST_CASE("GMRAE ignores the order of time steps") {
    tsf::testing::Rng rng(4);
    for (int trial = 0; trial < 500; ++trial) {
        const auto a = tsf::testing::normal_vector(rng, 12, 5.0);
        const auto p = tsf::testing::normal_vector(rng, 12, 5.0);
        std::vector<std::size_t> idx(12);
        std::iota(idx.begin(), idx.end(), 0);
        std::shuffle(idx.begin(), idx.end(), rng);
        V ra(12), rp(12);
        for (std::size_t i = 0; i < 12; ++i) {
            ra[i] = a[idx[i]];
            rp[i] = p[idx[i]];
        }
        REQUIRE_THAT(gmrae(sp(ra), sp(rp)).value, WithinRel(gmrae(sp(a), sp(p)).value, 1e-12));
    }
}
