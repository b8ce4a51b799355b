#pragma once

#include "tsf/series.hpp"

#include <optional>
#include <vector>

namespace tsf {

/// Classical additive decomposition. Trend and residual are undefined for
/// the first and last floor(m/2) observations.
struct Decomposition {
    int period = 12;
    std::vector<std::optional<double>> trend;
    std::vector<double> seasonal;
    std::vector<std::optional<double>> residual;
    /// Seasonal index per calendar position (0 = January for monthly data), zero-sum.
    std::vector<double> figure;
};

/// Trend by centred moving average (2 x m for even m), seasonal indices as
/// per-position means of the detrended series centred to zero mean.
[[nodiscard]] Decomposition classical_additive_decompose(const TimeSeries& ts);

struct YearTrace {
    int year = 0;
    int first_month = 1;
    std::vector<double> values;
};

/// One trace per calendar year, in chronological order.
[[nodiscard]] std::vector<YearTrace> season_plot_data(const TimeSeries& ts);

} // namespace tsf
