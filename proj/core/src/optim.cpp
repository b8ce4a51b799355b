#include "tsf/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tsf::optim {

namespace {

double safe_eval(const Objective& f, const std::vector<double>& x, int& evals) {
    ++evals;
    const double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
}

} // namespace

NelderMeadResult nelder_mead(const Objective& f, std::vector<double> start, const NelderMeadOptions& options) {
    const std::size_t n = start.size();
    NelderMeadResult res;
    if (n == 0) {
        res.x = start;
        res.value = safe_eval(f, start, res.evaluations);
        res.converged = true;
        return res;
    }

    constexpr double kReflect = 1.0;
    constexpr double kExpand = 2.0;
    constexpr double kContract = 0.5;
    constexpr double kShrink = 0.5;

    std::vector<std::vector<double>> simplex(n + 1, start);
    for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += options.initial_step;
    std::vector<double> values(n + 1);
    for (std::size_t i = 0; i <= n; ++i) values[i] = safe_eval(f, simplex[i], res.evaluations);

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), trial(n), trial2(n);

    const auto point_along = [&](double coef, std::vector<double>& out, const std::vector<double>& worst) {
        for (std::size_t j = 0; j < n; ++j) out[j] = centroid[j] + coef * (centroid[j] - worst[j]);
    };

    for (res.iterations = 0; res.iterations < options.max_iterations; ++res.iterations) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second_worst = order[n - 1];
        res.trace.push_back(values[best]);

        const double fb = values[best];
        const double fw = values[worst];
        if (std::isfinite(fw) && fw - fb <= options.rel_tol * (std::abs(fb) + options.rel_tol)) {
            res.converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j];
        }
        for (double& c : centroid) c /= static_cast<double>(n);

        point_along(kReflect, trial, simplex[worst]);
        const double fr = safe_eval(f, trial, res.evaluations);
        if (fr < fb) {
            point_along(kExpand, trial2, simplex[worst]);
            const double fe = safe_eval(f, trial2, res.evaluations);
            if (fe < fr) {
                simplex[worst] = trial2;
                values[worst] = fe;
            } else {
                simplex[worst] = trial;
                values[worst] = fr;
            }
            continue;
        }
        if (fr < values[second_worst]) {
            simplex[worst] = trial;
            values[worst] = fr;
            continue;
        }
        // Contraction: outside if the reflected point improved on the worst, inside otherwise.
        const bool outside = fr < fw;
        point_along(outside ? kContract : -kContract, trial2, simplex[worst]);
        const double fc = safe_eval(f, trial2, res.evaluations);
        if (fc < (outside ? fr : fw)) {
            simplex[worst] = trial2;
            values[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) continue;
            for (std::size_t j = 0; j < n; ++j) simplex[i][j] = simplex[best][j] + kShrink * (simplex[i][j] - simplex[best][j]);
            values[i] = safe_eval(f, simplex[i], res.evaluations);
        }
    }

    const auto best_it = std::min_element(values.begin(), values.end());
    const auto best = static_cast<std::size_t>(best_it - values.begin());
    res.x = simplex[best];
    res.value = *best_it;
    return res;
}

Eigen::MatrixXd numeric_hessian(const Objective& f, const std::vector<double>& x, double rel_step) {
    const std::size_t n = x.size();
    Eigen::MatrixXd h(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    std::vector<double> step(n);
    for (std::size_t i = 0; i < n; ++i) step[i] = rel_step * std::max(1.0, std::abs(x[i]));
    const double f0 = f(x);
    auto p = x;
    for (std::size_t i = 0; i < n; ++i) {
        p = x;
        p[i] = x[i] + step[i];
        const double fp = f(p);
        p[i] = x[i] - step[i];
        const double fm = f(p);
        h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = (fp - 2.0 * f0 + fm) / (step[i] * step[i]);
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto corner = [&](double si, double sj) {
                p = x;
                p[i] += si * step[i];
                p[j] += sj * step[j];
                return f(p);
            };
            const double v = (corner(1, 1) - corner(1, -1) - corner(-1, 1) + corner(-1, -1)) / (4.0 * step[i] * step[j]);
            h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
            h(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
        }
    }
    return h;
}

} // namespace tsf::optim
