#pragma once

#include "tsf/series.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tsf::sarima {

/// SARIMA(p, d, q)(P, D, Q)[s], optionally with a constant in the differenced
/// series ("drift"). Undifferenced models (d = D = 0) always carry a mean.
struct SarimaOrder {
    int p = 0;
    int d = 0;
    int q = 0;
    int P = 0;
    int D = 0;
    int Q = 0;
    int s = 12;
    bool include_drift = false;

    /// Throws std::invalid_argument unless s >= 1 and every order is in [0, 5].
    void validate() const;
    [[nodiscard]] bool has_mean() const { return include_drift || (d == 0 && D == 0); }
    /// Number of estimated coefficients, excluding the innovation variance.
    [[nodiscard]] int coefficient_count() const { return p + P + q + Q + (has_mean() ? 1 : 0); }
    /// e.g. "ARIMA(0,1,3)(0,0,1)[12] with drift".
    [[nodiscard]] std::string label() const;

    friend bool operator==(const SarimaOrder&, const SarimaOrder&) = default;
};

/// Model coefficients in polynomial form: phi(B) Phi(B^s) w_t = theta(B) Theta(B^s) e_t
/// with phi(B) = 1 - sum phi_i B^i and theta(B) = 1 + sum theta_i B^i.
struct Coefficients {
    std::vector<double> phi;
    std::vector<double> Phi;
    std::vector<double> theta;
    std::vector<double> Theta;
    double mean = 0.0;

    /// Flat layout used by the optimizer: phi, Phi, theta, Theta, [mean].
    [[nodiscard]] std::vector<double> pack(const SarimaOrder& order) const;
    [[nodiscard]] static Coefficients unpack(std::span<const double> flat, const SarimaOrder& order);
};

/// Lag weights of the expanded products. ar[k-1] is the weight at lag k with
/// w_t = sum ar_k w_{t-k} + ...; ma[k-1] enters as + ma_k e_{t-k}.
struct LagWeights {
    std::vector<double> ar;
    std::vector<double> ma;
};

[[nodiscard]] LagWeights expand_polynomials(const Coefficients& c, const SarimaOrder& order);

struct CssResult {
    double loglik = 0.0;
    double sigma2 = 0.0;
    double sse = 0.0;
    /// One residual per differenced observation; the first `conditioning`
    /// entries are zero by construction.
    std::vector<double> residuals;
    std::size_t conditioning = 0;
    std::size_t n_effective = 0;
};

/// Conditional-sum-of-squares Gaussian log-likelihood of the differenced series.
/// Pre-sample residuals are zero and the first max-AR-lag observations are
/// conditioned on. Returns loglik = -inf when a residual is non-finite.
[[nodiscard]] CssResult css_loglik(std::span<const double> diffed, const Coefficients& c, const SarimaOrder& order);

/// True when 1 - sum a_i z^i has all roots outside the unit circle.
[[nodiscard]] bool is_stationary(std::span<const double> ar);
/// True when 1 + sum b_i z^i has all roots outside the unit circle.
[[nodiscard]] bool is_invertible(std::span<const double> ma);

struct CoefficientEstimate {
    std::string name;
    double value = 0.0;
    std::optional<double> se;
    std::optional<double> z;
    std::optional<double> p_value;
};

struct SarimaFit {
    SarimaOrder order;
    Coefficients coef;
    std::vector<CoefficientEstimate> table;
    double sigma2 = 0.0;
    double loglik = 0.0;
    double aic = 0.0;
    std::vector<double> residuals;
    std::size_t conditioning = 0;
    bool converged = false;
    std::vector<std::string> warnings;
    std::vector<double> optimizer_trace;

    /// Original-scale training values (needed to integrate forecasts).
    std::vector<double> history;
    std::vector<double> diffed;
};

struct FitOptions {
    double rel_tol = 1e-10;
    int max_iterations = 5000;
    int restarts = 5;
    std::uint64_t seed = 7;
    double hessian_step = 1e-4;
};

/// CSS estimation via Nelder-Mead with a stationarity/invertibility barrier;
/// standard errors from the inverse numerical Hessian of -loglik.
[[nodiscard]] SarimaFit fit(const TimeSeries& ts, const SarimaOrder& order, const FitOptions& options = {});
[[nodiscard]] SarimaFit fit(std::span<const double> values, const SarimaOrder& order, const FitOptions& options = {});

struct GridFailure {
    SarimaOrder order;
    std::string reason;
};

struct GridResult {
    /// Ascending AIC; ties by fewer coefficients then lexicographic order.
    std::vector<SarimaFit> ranked;
    std::vector<GridFailure> failures;
};

/// Fits every candidate (concurrently up to `workers`); failures never abort the search.
[[nodiscard]] GridResult grid_search(const TimeSeries& ts, const std::vector<SarimaOrder>& candidates,
                                     const FitOptions& options = {}, unsigned workers = 1);

/// The twenty candidate orders of the influenza study's tentative-model table.
[[nodiscard]] std::vector<SarimaOrder> tentative_influenza_candidates();

/// h-step forecasts on the original scale: ARMA recursion on the differenced
/// scale with future innovations zero, then integrated.
[[nodiscard]] std::vector<double> forecast(const SarimaFit& fit, int horizon);

struct AcfPacf {
    std::vector<double> acf;
    std::vector<double> pacf;
    /// 1.96 / sqrt(n)
    double bound = 0.0;
};

/// Sample ACF and PACF (Durbin-Levinson) for lags 1..max_lag; max_lag < n/2.
[[nodiscard]] AcfPacf acf_pacf(std::span<const double> values, int max_lag);

} // namespace tsf::sarima
