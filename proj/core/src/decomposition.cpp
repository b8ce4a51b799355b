#include "tsf/decomposition.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tsf {

Decomposition classical_additive_decompose(const TimeSeries& ts) {
    const int m = ts.period();
    const std::size_t n = ts.size();
    if (m < 2 || n < 2 * static_cast<std::size_t>(m)) {
        throw std::invalid_argument("classical_additive_decompose: series shorter than two periods");
    }

    // Moving-average weights: 2 x m centred filter for even m, plain m-term for odd m.
    std::vector<double> weights;
    if (m % 2 == 0) {
        weights.assign(static_cast<std::size_t>(m) + 1, 1.0 / m);
        weights.front() = weights.back() = 0.5 / m;
    } else {
        weights.assign(static_cast<std::size_t>(m), 1.0 / m);
    }
    const std::size_t half = weights.size() / 2;

    Decomposition out;
    out.period = m;
    out.trend.assign(n, std::nullopt);
    out.residual.assign(n, std::nullopt);
    for (std::size_t t = half; t + half < n; ++t) {
        double acc = 0.0;
        for (std::size_t j = 0; j < weights.size(); ++j) acc += weights[j] * ts[t - half + j];
        out.trend[t] = acc;
    }

    std::vector<double> sums(static_cast<std::size_t>(m), 0.0);
    std::vector<int> counts(static_cast<std::size_t>(m), 0);
    const auto position = [&](std::size_t t) { return static_cast<std::size_t>(ts.month_at(t).ordinal() % m); };
    for (std::size_t t = 0; t < n; ++t) {
        if (!out.trend[t]) continue;
        sums[position(t)] += ts[t] - *out.trend[t];
        ++counts[position(t)];
    }
    out.figure.resize(static_cast<std::size_t>(m));
    for (std::size_t k = 0; k < out.figure.size(); ++k) {
        if (counts[k] == 0) throw std::invalid_argument("classical_additive_decompose: season position without data");
        out.figure[k] = sums[k] / counts[k];
    }
    const double centre = std::accumulate(out.figure.begin(), out.figure.end(), 0.0) / m;
    for (double& f : out.figure) f -= centre;

    out.seasonal.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        out.seasonal[t] = out.figure[position(t)];
        if (out.trend[t]) out.residual[t] = ts[t] - *out.trend[t] - out.seasonal[t];
    }
    return out;
}

std::vector<YearTrace> season_plot_data(const TimeSeries& ts) {
    std::vector<YearTrace> traces;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const YearMonth ym = ts.month_at(i);
        if (traces.empty() || traces.back().year != ym.year) {
            traces.push_back(YearTrace{ym.year, ym.month, {}});
        }
        traces.back().values.push_back(ts[i]);
    }
    return traces;
}

} // namespace tsf
