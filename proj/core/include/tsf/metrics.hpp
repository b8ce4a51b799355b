#pragma once

#include <cstddef>
#include <span>
#include <string>

namespace tsf::metrics {

enum class Scale { normalized, original };

[[nodiscard]] std::string to_string(Scale s);

/// Relative-error terms below this are floored before the logarithm in GMRAE.
inline constexpr double kGmraeFloor = 1e-12;

struct GmraeResult {
    double value = 0.0;
    std::size_t floored_terms = 0;
    /// Set when every term was floored; `value` is then meaningless.
    bool undefined = false;
};

[[nodiscard]] double mse(std::span<const double> actual, std::span<const double> predicted);
[[nodiscard]] double mae(std::span<const double> actual, std::span<const double> predicted);
/// exp(mean(ln|(y - yhat) / y|)); terms with y = 0 or y = yhat are floored.
[[nodiscard]] GmraeResult gmrae(std::span<const double> actual, std::span<const double> predicted);
/// RMSE / (RMS(actual) + RMS(predicted)), in [0, 1].
[[nodiscard]] double theil_u1(std::span<const double> actual, std::span<const double> predicted);

struct MetricReport {
    double mse = 0.0;
    double mae = 0.0;
    double gmrae = 0.0;
    bool gmrae_undefined = false;
    std::size_t gmrae_floored = 0;
    double theil_u1 = 0.0;
    std::size_t n = 0;
    Scale scale = Scale::original;
};

[[nodiscard]] MetricReport evaluate(std::span<const double> actual, std::span<const double> predicted, Scale scale);

} // namespace tsf::metrics
