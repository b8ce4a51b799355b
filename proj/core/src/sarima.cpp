#include "tsf/sarima.hpp"

#include "tsf/error.hpp"
#include "tsf/optim.hpp"
#include "tsf/parallel.hpp"
#include "tsf/stats_tests.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>
#include <tuple>

namespace tsf::sarima {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Step-down (inverse Durbin-Levinson) check on 1 - sum a_i z^i.
bool step_down_stable(std::vector<double> a) {
    while (!a.empty() && a.back() == 0.0) a.pop_back();
    for (std::size_t k = a.size(); k > 0; --k) {
        const double r = a[k - 1];
        if (!(std::abs(r) < 1.0 - 1e-10)) return false;
        std::vector<double> prev(k - 1);
        const double denom = 1.0 - r * r;
        for (std::size_t j = 0; j + 1 < k; ++j) prev[j] = (a[j] + r * a[k - 2 - j]) / denom;
        a = std::move(prev);
    }
    return true;
}

std::vector<double> multiply_seasonal(std::span<const double> nonseasonal, std::span<const double> seasonal, int s,
                                      double sign) {
    // (1 + sign*sum a_i B^i)(1 + sign*sum A_j B^{js}) = 1 + sign*sum w_k B^k.
    const std::size_t len = nonseasonal.size() + seasonal.size() * static_cast<std::size_t>(s);
    std::vector<double> poly(len + 1, 0.0);
    poly[0] = 1.0;
    std::vector<double> left(nonseasonal.size() + 1, 0.0);
    left[0] = 1.0;
    for (std::size_t i = 0; i < nonseasonal.size(); ++i) left[i + 1] = sign * nonseasonal[i];
    std::vector<double> right(seasonal.size() * static_cast<std::size_t>(s) + 1, 0.0);
    right[0] = 1.0;
    for (std::size_t j = 0; j < seasonal.size(); ++j) right[(j + 1) * static_cast<std::size_t>(s)] = sign * seasonal[j];
    std::fill(poly.begin(), poly.end(), 0.0);
    for (std::size_t i = 0; i < left.size(); ++i) {
        if (left[i] == 0.0) continue;
        for (std::size_t j = 0; j < right.size(); ++j) poly[i + j] += left[i] * right[j];
    }
    std::vector<double> weights(len);
    for (std::size_t k = 1; k <= len; ++k) weights[k - 1] = sign * poly[k];
    return weights;
}

double negative_loglik(std::span<const double> diffed, const Coefficients& c, const SarimaOrder& order) {
    if (!is_stationary(c.phi) || !is_stationary(c.Phi) || !is_invertible(c.theta) || !is_invertible(c.Theta)) {
        return kInf;
    }
    const auto res = css_loglik(diffed, c, order);
    return std::isfinite(res.loglik) ? -res.loglik : kInf;
}

std::vector<std::string> coefficient_names(const SarimaOrder& o) {
    std::vector<std::string> names;
    for (int i = 1; i <= o.p; ++i) names.push_back("ar" + std::to_string(i));
    for (int i = 1; i <= o.P; ++i) names.push_back("sar" + std::to_string(i));
    for (int i = 1; i <= o.q; ++i) names.push_back("ma" + std::to_string(i));
    for (int i = 1; i <= o.Q; ++i) names.push_back("sma" + std::to_string(i));
    if (o.has_mean()) names.emplace_back(o.d == 0 && o.D == 0 && !o.include_drift ? "mean" : "drift");
    return names;
}

} // namespace

void SarimaOrder::validate() const {
    if (s < 1) throw std::invalid_argument("SarimaOrder: season length must be >= 1");
    for (int v : {p, d, q, P, D, Q}) {
        if (v < 0 || v > 5) throw std::invalid_argument("SarimaOrder: orders must lie in [0, 5]");
    }
}

std::string SarimaOrder::label() const {
    std::string out = "ARIMA(" + std::to_string(p) + "," + std::to_string(d) + "," + std::to_string(q) + ")(" +
                      std::to_string(P) + "," + std::to_string(D) + "," + std::to_string(Q) + ")[" +
                      std::to_string(s) + "]";
    if (include_drift) out += " with drift";
    return out;
}

std::vector<double> Coefficients::pack(const SarimaOrder& order) const {
    std::vector<double> flat;
    flat.insert(flat.end(), phi.begin(), phi.end());
    flat.insert(flat.end(), Phi.begin(), Phi.end());
    flat.insert(flat.end(), theta.begin(), theta.end());
    flat.insert(flat.end(), Theta.begin(), Theta.end());
    if (order.has_mean()) flat.push_back(mean);
    return flat;
}

Coefficients Coefficients::unpack(std::span<const double> flat, const SarimaOrder& order) {
    if (flat.size() != static_cast<std::size_t>(order.coefficient_count())) {
        throw std::invalid_argument("Coefficients::unpack: size does not match order");
    }
    Coefficients c;
    auto it = flat.begin();
    const auto take = [&it](int n) {
        std::vector<double> v(it, it + n);
        it += n;
        return v;
    };
    c.phi = take(order.p);
    c.Phi = take(order.P);
    c.theta = take(order.q);
    c.Theta = take(order.Q);
    c.mean = order.has_mean() ? *it : 0.0;
    return c;
}

LagWeights expand_polynomials(const Coefficients& c, const SarimaOrder& order) {
    if (c.phi.size() != static_cast<std::size_t>(order.p) || c.Phi.size() != static_cast<std::size_t>(order.P) ||
        c.theta.size() != static_cast<std::size_t>(order.q) || c.Theta.size() != static_cast<std::size_t>(order.Q)) {
        throw std::invalid_argument("expand_polynomials: coefficient vectors do not match order");
    }
    LagWeights w;
    // AR: phi(B)Phi(B^s) = 1 - sum ar_k B^k, so the sign inside the product is -1.
    w.ar = multiply_seasonal(c.phi, c.Phi, order.s, -1.0);
    w.ma = multiply_seasonal(c.theta, c.Theta, order.s, 1.0);
    return w;
}

bool is_stationary(std::span<const double> ar) { return step_down_stable({ar.begin(), ar.end()}); }

bool is_invertible(std::span<const double> ma) {
    std::vector<double> neg(ma.size());
    std::transform(ma.begin(), ma.end(), neg.begin(), [](double v) { return -v; });
    return step_down_stable(std::move(neg));
}

CssResult css_loglik(std::span<const double> diffed, const Coefficients& c, const SarimaOrder& order) {
    const auto w = expand_polynomials(c, order);
    const std::size_t n = diffed.size();
    const std::size_t ncond = w.ar.size();
    if (n <= ncond) throw std::invalid_argument("css_loglik: differenced series shorter than the AR lag span");

    CssResult out;
    out.conditioning = ncond;
    out.n_effective = n - ncond;
    out.residuals.assign(n, 0.0);
    const double mu = order.has_mean() ? c.mean : 0.0;
    double sse = 0.0;
    for (std::size_t t = ncond; t < n; ++t) {
        double e = diffed[t] - mu;
        for (std::size_t k = 1; k <= w.ar.size(); ++k) {
            if (w.ar[k - 1] != 0.0) e -= w.ar[k - 1] * (diffed[t - k] - mu);
        }
        for (std::size_t k = 1; k <= w.ma.size() && k <= t; ++k) {
            if (w.ma[k - 1] != 0.0) e -= w.ma[k - 1] * out.residuals[t - k];
        }
        out.residuals[t] = e;
        sse += e * e;
    }
    out.sse = sse;
    const double neff = static_cast<double>(out.n_effective);
    out.sigma2 = sse / neff;
    if (!std::isfinite(sse) || !(out.sigma2 > 0.0)) {
        out.loglik = -kInf;
        return out;
    }
    out.loglik = -0.5 * neff * (std::log(2.0 * std::numbers::pi * out.sigma2) + 1.0);
    return out;
}

SarimaFit fit(std::span<const double> values, const SarimaOrder& order, const FitOptions& options) {
    order.validate();
    const auto diffed = difference(values, order.d, order.D, order.s);
    const int k = order.coefficient_count();
    const std::size_t ar_span = static_cast<std::size_t>(order.p + order.P * order.s);
    if (diffed.size() < static_cast<std::size_t>(10 + k) || diffed.size() <= ar_span) {
        throw std::invalid_argument("sarima::fit: series too short for " + order.label());
    }

    const optim::Objective objective = [&](const std::vector<double>& x) {
        return negative_loglik(diffed, Coefficients::unpack(x, order), order);
    };

    Coefficients start;
    start.phi.assign(static_cast<std::size_t>(order.p), 0.0);
    start.Phi.assign(static_cast<std::size_t>(order.P), 0.0);
    start.theta.assign(static_cast<std::size_t>(order.q), 0.0);
    start.Theta.assign(static_cast<std::size_t>(order.Q), 0.0);
    start.mean = std::accumulate(diffed.begin(), diffed.end(), 0.0) / static_cast<double>(diffed.size());

    // Mean moves on the data scale; ARMA coefficients on the unit scale.
    double scale = 0.0;
    for (double v : diffed) scale += (v - start.mean) * (v - start.mean);
    scale = std::sqrt(scale / static_cast<double>(diffed.size()));
    if (!(scale > 0.0)) scale = 1.0;

    optim::NelderMeadOptions nm;
    nm.rel_tol = options.rel_tol;
    nm.max_iterations = options.max_iterations;
    nm.initial_step = 0.1;

    SarimaFit out;
    out.order = order;
    out.history.assign(values.begin(), values.end());
    out.diffed = diffed;

    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> jitter(0.0, 0.1);
    optim::NelderMeadResult best;
    best.x = start.pack(order);
    best.value = objective(best.x);
    bool any_converged = false;
    for (int r = 0; r <= options.restarts; ++r) {
        auto x0 = best.x;
        if (r > 0) {
            // Jitter, halving the perturbation until the start is admissible.
            for (double amp = 1.0; amp > 1e-3; amp *= 0.5) {
                auto trial = best.x;
                for (std::size_t i = 0; i < trial.size(); ++i) {
                    const bool is_mean = order.has_mean() && i + 1 == trial.size();
                    trial[i] += amp * jitter(rng) * (is_mean ? scale : 1.0);
                }
                if (std::isfinite(objective(trial))) {
                    x0 = std::move(trial);
                    break;
                }
            }
        }
        // Rescale the mean coordinate so a unit simplex step is meaningful.
        const optim::Objective scaled = [&](const std::vector<double>& z) {
            auto x = z;
            if (order.has_mean()) x.back() *= scale;
            return objective(x);
        };
        auto z0 = x0;
        if (order.has_mean()) z0.back() /= scale;
        auto res = optim::nelder_mead(scaled, z0, nm);
        if (order.has_mean()) res.x.back() *= scale;
        out.optimizer_trace.insert(out.optimizer_trace.end(), res.trace.begin(), res.trace.end());
        any_converged = any_converged || res.converged;
        if (res.value < best.value) best = std::move(res);
    }
    if (!std::isfinite(best.value)) throw NumericalError("sarima::fit: no admissible parameters for " + order.label());
    out.converged = any_converged;
    if (!any_converged) out.warnings.emplace_back("optimizer reached the iteration limit");

    out.coef = Coefficients::unpack(best.x, order);
    const auto css = css_loglik(diffed, out.coef, order);
    out.sigma2 = css.sigma2;
    out.loglik = css.loglik;
    out.residuals = css.residuals;
    out.conditioning = css.conditioning;
    out.aic = -2.0 * out.loglik + 2.0 * (k + 1);

    if (!is_stationary(out.coef.phi) || !is_stationary(out.coef.Phi)) out.warnings.emplace_back("AR polynomial not stationary");
    if (!is_invertible(out.coef.theta) || !is_invertible(out.coef.Theta)) out.warnings.emplace_back("MA polynomial not invertible");

    const auto names = coefficient_names(order);
    out.table.resize(names.size());
    for (std::size_t i = 0; i < names.size(); ++i) {
        out.table[i].name = names[i];
        out.table[i].value = best.x[i];
    }
    if (k > 0) {
        const Eigen::MatrixXd hess = optim::numeric_hessian(objective, best.x, options.hessian_step);
        Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
        const bool finite = hess.allFinite();
        if (finite && ldlt.info() == Eigen::Success && ldlt.isPositive() && (ldlt.vectorD().array() > 0).all()) {
            const Eigen::MatrixXd cov = ldlt.solve(Eigen::MatrixXd::Identity(k, k));
            for (int i = 0; i < k; ++i) {
                const double var = cov(i, i);
                if (!(var > 0.0) || !std::isfinite(var)) continue;
                auto& row = out.table[static_cast<std::size_t>(i)];
                row.se = std::sqrt(var);
                row.z = row.value / *row.se;
                row.p_value = 2.0 * (1.0 - stats::normal_cdf(std::abs(*row.z)));
            }
        } else {
            out.warnings.emplace_back("Hessian not positive definite; standard errors unavailable");
        }
    }
    return out;
}

SarimaFit fit(const TimeSeries& ts, const SarimaOrder& order, const FitOptions& options) {
    return fit(ts.values(), order, options);
}

GridResult grid_search(const TimeSeries& ts, const std::vector<SarimaOrder>& candidates, const FitOptions& options,
                       unsigned workers) {
    if (candidates.empty()) throw std::invalid_argument("grid_search: empty candidate list");
    std::vector<std::optional<SarimaFit>> fits(candidates.size());
    std::vector<std::string> errors(candidates.size());
    parallel_for(candidates.size(), workers, [&](std::size_t i) {
        try {
            fits[i] = fit(ts, candidates[i], options);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });

    GridResult out;
    std::vector<std::size_t> ok;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (fits[i] && std::isfinite(fits[i]->aic)) ok.push_back(i);
        else out.failures.push_back({candidates[i], errors[i].empty() ? "non-finite AIC" : errors[i]});
    }
    const auto key = [&](std::size_t i) {
        const auto& o = candidates[i];
        return std::make_tuple(fits[i]->aic, o.coefficient_count(), o.p, o.d, o.q, o.P, o.D, o.Q, o.s, o.include_drift);
    };
    std::stable_sort(ok.begin(), ok.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
    for (std::size_t i : ok) out.ranked.push_back(std::move(*fits[i]));
    return out;
}

std::vector<SarimaOrder> tentative_influenza_candidates() {
    const auto o = [](int p, int q, int P, int Q, bool drift) { return SarimaOrder{p, 1, q, P, 0, Q, 12, drift}; };
    return {o(0, 0, 0, 1, false), o(0, 0, 0, 1, true), o(0, 0, 0, 2, false), o(0, 0, 0, 2, true),
            o(0, 0, 1, 0, false), o(0, 0, 1, 0, true), o(0, 0, 1, 1, false), o(0, 0, 1, 1, true),
            o(0, 3, 0, 1, false), o(0, 3, 0, 1, true), o(1, 0, 0, 1, false), o(1, 0, 0, 2, false),
            o(2, 0, 0, 1, false), o(2, 0, 0, 2, false), o(2, 0, 1, 0, true), o(2, 0, 1, 2, false),
            o(2, 0, 1, 2, true),  o(3, 0, 0, 1, false), o(3, 0, 0, 1, true), o(3, 0, 0, 2, false)};
}

std::vector<double> forecast(const SarimaFit& fit, int horizon) {
    if (horizon < 1) throw std::invalid_argument("sarima::forecast: horizon must be >= 1");
    const auto& order = fit.order;
    const auto w = expand_polynomials(fit.coef, order);
    const double mu = order.has_mean() ? fit.coef.mean : 0.0;

    std::vector<double> z = fit.diffed;
    std::vector<double> e = fit.residuals;
    const std::size_t n = z.size();
    for (int h = 0; h < horizon; ++h) {
        const std::size_t t = n + static_cast<std::size_t>(h);
        double v = mu;
        for (std::size_t k = 1; k <= w.ar.size() && k <= t; ++k) v += w.ar[k - 1] * (z[t - k] - mu);
        for (std::size_t k = 1; k <= w.ma.size() && k <= t; ++k) v += w.ma[k - 1] * e[t - k];
        z.push_back(v);
        e.push_back(0.0);
    }
    const std::size_t lag = fit.history.size() - fit.diffed.size();
    const std::span<const double> pivots(fit.history.data() + fit.history.size() - lag, lag);
    const std::span<const double> future(z.data() + n, static_cast<std::size_t>(horizon));
    auto full = integrate(future, pivots, order.d, order.D, order.s);
    return {full.begin() + static_cast<long>(lag), full.end()};
}

AcfPacf acf_pacf(std::span<const double> values, int max_lag) {
    if (max_lag < 1 || 2 * static_cast<std::size_t>(max_lag) >= values.size()) {
        throw std::invalid_argument("acf_pacf: max_lag must be in [1, n/2)");
    }
    AcfPacf out;
    out.acf = stats::autocorrelation(values, max_lag);
    out.bound = 1.96 / std::sqrt(static_cast<double>(values.size()));

    // Durbin-Levinson.
    const auto m = static_cast<std::size_t>(max_lag);
    out.pacf.resize(m);
    std::vector<double> phi(m + 1, 0.0), prev(m + 1, 0.0);
    double v = 1.0;
    for (std::size_t k = 1; k <= m; ++k) {
        double num = out.acf[k - 1];
        for (std::size_t j = 1; j < k; ++j) num -= prev[j] * out.acf[k - j - 1];
        const double kk = num / v;
        phi[k] = kk;
        for (std::size_t j = 1; j < k; ++j) phi[j] = prev[j] - kk * prev[k - j];
        v *= 1.0 - kk * kk;
        out.pacf[k - 1] = kk;
        prev = phi;
    }
    return out;
}

} // namespace tsf::sarima
