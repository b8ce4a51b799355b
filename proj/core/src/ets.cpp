#include "tsf/ets.hpp"

#include "tsf/error.hpp"
#include "tsf/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace tsf::ets {

namespace {

struct Box {
    double lo;
    double hi;
};

// alpha, beta, gamma. beta may sit exactly at 0 and gamma exactly at 1.
constexpr Box kBoxes[3] = {{1e-6, 1.0 - 1e-6}, {0.0, 1.0 - 1e-6}, {1e-6, 1.0}};
constexpr double kWiden = 1e-3;

double to_box(double x, const Box& box) {
    const double s = 1.0 / (1.0 + std::exp(-x));
    return std::clamp(-kWiden + (1.0 + 2.0 * kWiden) * s, box.lo, box.hi);
}

double from_box(double p) {
    const double s = std::clamp((p + kWiden) / (1.0 + 2.0 * kWiden), 1e-9, 1.0 - 1e-9);
    return std::log(s / (1.0 - s));
}

double cycle_mean(std::span<const double> y, std::size_t begin, std::size_t m) {
    return std::accumulate(y.begin() + static_cast<long>(begin), y.begin() + static_cast<long>(begin + m), 0.0) /
           static_cast<double>(m);
}

double sse_only(std::span<const double> y, std::size_t m, double alpha, double beta, double gamma,
                const HoltWintersState& init) {
    double level = init.level;
    double slope = init.slope;
    std::vector<double> season(init.seasonals);
    double sse = 0.0;
    for (std::size_t t = m; t < y.size(); ++t) {
        double& s = season[(t - m) % m];
        const double pred = level + slope + s;
        const double err = y[t] - pred;
        sse += err * err;
        const double new_level = alpha * (y[t] - s) + (1.0 - alpha) * (level + slope);
        const double new_slope = beta * (new_level - level) + (1.0 - beta) * slope;
        s = gamma * (y[t] - level - slope) + (1.0 - gamma) * s;
        level = new_level;
        slope = new_slope;
    }
    return sse;
}

} // namespace

HoltWintersState initial_state(std::span<const double> y, int period) {
    if (period < 1) throw std::invalid_argument("initial_state: period must be >= 1");
    const auto m = static_cast<std::size_t>(period);
    if (y.size() < 2 * m) throw std::invalid_argument("initial_state: need two full cycles");
    const double mean1 = cycle_mean(y, 0, m);
    const double mean2 = cycle_mean(y, m, m);
    HoltWintersState st;
    st.slope = (mean2 - mean1) / static_cast<double>(m);
    const double centre = 0.5 * static_cast<double>(m - 1);
    st.level = mean1 + st.slope * centre;
    st.seasonals.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        st.seasonals[j] = y[j] - (mean1 + st.slope * (static_cast<double>(j) - centre));
    }
    return st;
}

HoltWintersFit hw_filter(std::span<const double> y, int period, double alpha, double beta, double gamma,
                         const HoltWintersState& init) {
    const auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in_unit(alpha) || !in_unit(beta) || !in_unit(gamma)) {
        throw std::invalid_argument("hw_filter: smoothing parameters must lie in [0, 1]");
    }
    if (period < 1) throw std::invalid_argument("hw_filter: period must be >= 1");
    const auto m = static_cast<std::size_t>(period);
    if (init.seasonals.size() != m) throw std::invalid_argument("hw_filter: need exactly m initial seasonals");
    if (y.size() <= m) throw std::invalid_argument("hw_filter: series shorter than one cycle plus one");

    HoltWintersFit fit;
    fit.period = period;
    fit.params.alpha = alpha;
    fit.params.beta = beta;
    fit.params.gamma = gamma;

    double level = init.level;
    double slope = init.slope;
    // Ring buffer: season[(t - m) % m] holds s_{t-m} when processing t.
    std::vector<double> season(init.seasonals);
    const std::size_t steps = y.size() - m;
    fit.fitted.reserve(steps);
    fit.residuals.reserve(steps);
    fit.level_path.reserve(steps);
    fit.slope_path.reserve(steps);
    for (std::size_t t = m; t < y.size(); ++t) {
        double& s = season[(t - m) % m];
        const double pred = level + slope + s;
        fit.fitted.push_back(pred);
        fit.residuals.push_back(y[t] - pred);
        const double new_level = alpha * (y[t] - s) + (1.0 - alpha) * (level + slope);
        const double new_slope = beta * (new_level - level) + (1.0 - beta) * slope;
        s = gamma * (y[t] - level - slope) + (1.0 - gamma) * s;
        level = new_level;
        slope = new_slope;
        fit.level_path.push_back(level);
        fit.slope_path.push_back(slope);
    }
    fit.sse = 0.0;
    for (double e : fit.residuals) fit.sse += e * e;

    fit.params.state.level = level;
    fit.params.state.slope = slope;
    fit.params.state.seasonals.resize(m);
    // Chronological order s_{n-m} .. s_{n-1}: the next slot to be overwritten comes first.
    for (std::size_t j = 0; j < m; ++j) fit.params.state.seasonals[j] = season[(steps + j) % m];
    return fit;
}

HoltWintersFit hw_filter(const TimeSeries& ts, double alpha, double beta, double gamma, const HoltWintersState& init) {
    return hw_filter(ts.values(), ts.period(), alpha, beta, gamma, init);
}

HoltWintersFit fit_holt_winters(const TimeSeries& ts, const FitOptions& options) {
    const int period = ts.period();
    const auto m = static_cast<std::size_t>(period);
    const auto y = ts.values();
    if (y.size() <= 2 * m) throw std::invalid_argument("fit_holt_winters: series length must exceed two cycles");

    const HoltWintersState init = initial_state(y, period);
    const optim::Objective objective = [&](const std::vector<double>& x) {
        const double sse = sse_only(y, m, to_box(x[0], kBoxes[0]), to_box(x[1], kBoxes[1]), to_box(x[2], kBoxes[2]), init);
        return std::isfinite(sse) ? sse : std::numeric_limits<double>::infinity();
    };

    optim::NelderMeadOptions nm;
    nm.rel_tol = options.rel_tol;
    nm.max_iterations = options.max_iterations;
    nm.initial_step = 1.0;

    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> jitter(0.0, 0.5);
    std::vector<double> start = {from_box(0.3), from_box(0.1), from_box(0.1)};

    std::vector<double> trace;
    optim::NelderMeadResult best;
    for (int r = 0; r <= options.restarts; ++r) {
        auto x0 = r == 0 ? start : best.x;
        if (r > 0) {
            for (double& v : x0) v += jitter(rng);
        }
        auto res = optim::nelder_mead(objective, x0, nm);
        trace.insert(trace.end(), res.trace.begin(), res.trace.end());
        if (r == 0 || res.value < best.value) best = std::move(res);
    }
    if (!std::isfinite(best.value)) throw NumericalError("fit_holt_winters: optimizer found no finite SSE");

    auto fit = hw_filter(y, period, to_box(best.x[0], kBoxes[0]), to_box(best.x[1], kBoxes[1]),
                         to_box(best.x[2], kBoxes[2]), init);
    fit.optimizer_trace = std::move(trace);
    return fit;
}

std::vector<double> hw_forecast(const HoltWintersState& state, int horizon) {
    if (horizon < 1) throw std::invalid_argument("hw_forecast: horizon must be >= 1");
    const std::size_t m = state.seasonals.size();
    if (m == 0) throw std::invalid_argument("hw_forecast: empty seasonal state");
    std::vector<double> out(static_cast<std::size_t>(horizon));
    for (int h = 1; h <= horizon; ++h) {
        out[static_cast<std::size_t>(h - 1)] =
            state.level + h * state.slope + state.seasonals[static_cast<std::size_t>(h - 1) % m];
    }
    return out;
}

std::vector<double> hw_forecast(const HoltWintersFit& fit, int horizon) { return hw_forecast(fit.params.state, horizon); }

} // namespace tsf::ets
