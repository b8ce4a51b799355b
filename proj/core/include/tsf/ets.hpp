#pragma once

#include "tsf/series.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace tsf::ets {

struct HoltWintersState {
    double level = 0.0;
    double slope = 0.0;
    /// seasonals[j] is the seasonal term applied j+1 steps after the state's time,
    /// i.e. s_{t+1-m} ... s_t in chronological order.
    std::vector<double> seasonals;
};

struct HoltWintersParams {
    double alpha = 0.3;
    double beta = 0.1;
    double gamma = 0.1;
    /// Final state after filtering the whole series.
    HoltWintersState state;
};

struct HoltWintersFit {
    int period = 12;
    HoltWintersParams params;
    /// One-step-ahead predictions for observations m .. n-1.
    std::vector<double> fitted;
    std::vector<double> residuals;
    /// Level and slope after each filtered observation.
    std::vector<double> level_path;
    std::vector<double> slope_path;
    double sse = 0.0;
    /// Best SSE per optimizer iteration (all restarts, concatenated).
    std::vector<double> optimizer_trace;
};

/// Initial state from the first two cycles: slope from the difference of
/// cycle means, level at the end of cycle one, seasonals detrended.
[[nodiscard]] HoltWintersState initial_state(std::span<const double> y, int period);

/// Runs the additive recursions from observation m on, starting from `init`
/// (the state at observation m-1).
[[nodiscard]] HoltWintersFit hw_filter(std::span<const double> y, int period, double alpha, double beta, double gamma,
                                       const HoltWintersState& init);
[[nodiscard]] HoltWintersFit hw_filter(const TimeSeries& ts, double alpha, double beta, double gamma,
                                       const HoltWintersState& init);

struct FitOptions {
    double rel_tol = 1e-8;
    int max_iterations = 2000;
    int restarts = 3;
    std::uint64_t seed = 42;
};

/// Minimises the one-step SSE over (alpha, beta, gamma) with a Nelder-Mead
/// search in logistic coordinates. Throws NumericalError if no finite SSE is found.
[[nodiscard]] HoltWintersFit fit_holt_winters(const TimeSeries& ts, const FitOptions& options = {});

/// l + h*b + s_{t+h-m(k+1)}, k = floor((h-1)/m).
[[nodiscard]] std::vector<double> hw_forecast(const HoltWintersFit& fit, int horizon);
[[nodiscard]] std::vector<double> hw_forecast(const HoltWintersState& state, int horizon);

} // namespace tsf::ets
