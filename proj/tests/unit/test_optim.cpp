#include "tsf/optim.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>

using namespace tsf::optim;
using Catch::Matchers::WithinAbs;

TEST_CASE("Nelder-Mead minimises a shifted quadratic") {
    const Objective f = [](const std::vector<double>& x) {
        return (x[0] - 1.5) * (x[0] - 1.5) + 4.0 * (x[1] + 0.5) * (x[1] + 0.5) + 3.0;
    };
    NelderMeadOptions opt;
    opt.rel_tol = 1e-14;
    opt.max_iterations = 5000;
    const auto r = nelder_mead(f, {0.0, 0.0}, opt);
    CHECK(r.converged);
    CHECK_THAT(r.x[0], WithinAbs(1.5, 1e-5));
    CHECK_THAT(r.x[1], WithinAbs(-0.5, 1e-5));
    CHECK_THAT(r.value, WithinAbs(3.0, 1e-10));
}

TEST_CASE("Nelder-Mead handles the Rosenbrock valley") {
    const Objective f = [](const std::vector<double>& x) {
        return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
    };
    NelderMeadOptions opt;
    opt.rel_tol = 1e-16;
    opt.max_iterations = 20000;
    opt.initial_step = 0.5;
    const auto r = nelder_mead(f, {-1.2, 1.0}, opt);
    CHECK_THAT(r.x[0], WithinAbs(1.0, 1e-3));
    CHECK_THAT(r.x[1], WithinAbs(1.0, 2e-3));
}

TEST_CASE("the trace is non-increasing and infeasible points are avoided") {
    const Objective f = [](const std::vector<double>& x) {
        if (x[0] < 0.2) return std::numeric_limits<double>::infinity();
        return (x[0] - 0.1) * (x[0] - 0.1);
    };
    NelderMeadOptions opt;
    opt.initial_step = 0.3;
    const auto r = nelder_mead(f, {1.0}, opt);
    CHECK(r.x[0] >= 0.2);
    CHECK_THAT(r.x[0], WithinAbs(0.2, 1e-3));
    for (std::size_t i = 1; i < r.trace.size(); ++i) REQUIRE(r.trace[i] <= r.trace[i - 1]);
}

TEST_CASE("NaN objective values are treated as infeasible") {
    const Objective f = [](const std::vector<double>& x) {
        return x[0] > 2.0 ? std::numeric_limits<double>::quiet_NaN() : (x[0] - 3.0) * (x[0] - 3.0);
    };
    const auto r = nelder_mead(f, {0.0});
    CHECK(std::isfinite(r.value));
    CHECK(r.x[0] <= 2.0);
}

TEST_CASE("numeric Hessian of a quadratic form") {
    const Objective f = [](const std::vector<double>& x) {
        return 2.0 * x[0] * x[0] + 3.0 * x[0] * x[1] + 5.0 * x[1] * x[1] - x[0];
    };
    const auto h = numeric_hessian(f, {0.3, -0.7});
    CHECK_THAT(h(0, 0), WithinAbs(4.0, 1e-6));
    CHECK_THAT(h(0, 1), WithinAbs(3.0, 1e-6));
    CHECK_THAT(h(1, 0), WithinAbs(3.0, 1e-6));
    CHECK_THAT(h(1, 1), WithinAbs(10.0, 1e-6));
}
