#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tsf {

/// Calendar month. Ordered chronologically; arithmetic is in whole months.
struct YearMonth {
    int year = 2000;
    int month = 1; // 1..12

    /// Months since year 0, January.
    [[nodiscard]] constexpr long ordinal() const { return static_cast<long>(year) * 12 + (month - 1); }
    [[nodiscard]] static constexpr YearMonth from_ordinal(long ord) {
        return YearMonth{static_cast<int>(ord / 12), static_cast<int>(ord % 12) + 1};
    }
    [[nodiscard]] constexpr YearMonth plus(long months) const { return from_ordinal(ordinal() + months); }

    /// Parses `YYYY-MM` or `YYYY-MM-DD` (the day is ignored). Throws DataError.
    [[nodiscard]] static YearMonth parse(std::string_view text);
    [[nodiscard]] std::string to_string() const;

    friend constexpr auto operator<=>(const YearMonth&, const YearMonth&) = default;
};

/// Monthly observations with implied consecutive timestamps.
class TimeSeries {
public:
    TimeSeries(YearMonth start, std::vector<double> values, int period = 12);

    [[nodiscard]] YearMonth start() const { return start_; }
    [[nodiscard]] YearMonth last() const { return start_.plus(static_cast<long>(values_.size()) - 1); }
    [[nodiscard]] YearMonth month_at(std::size_t i) const { return start_.plus(static_cast<long>(i)); }
    [[nodiscard]] int period() const { return period_; }
    [[nodiscard]] std::size_t size() const { return values_.size(); }
    [[nodiscard]] std::span<const double> values() const { return values_; }
    [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }

    /// Index of `m` within the series, or -1 when outside.
    [[nodiscard]] long index_of(YearMonth m) const;

    /// Same timestamps and period, new values (must have equal length).
    [[nodiscard]] TimeSeries with_values(std::vector<double> values) const;

private:
    YearMonth start_;
    std::vector<double> values_;
    int period_;
};

/// Reads a monthly series from CSV. Rows may be unsorted; duplicate months
/// and gaps are rejected with a DataError naming the offending month.
[[nodiscard]] TimeSeries load_csv(const std::filesystem::path& path,
                                  std::string_view value_column,
                                  std::string_view date_column,
                                  int period = 12);

/// Splits so the first part ends at `boundary` (inclusive). Both parts must be non-empty.
[[nodiscard]] std::pair<TimeSeries, TimeSeries> train_test_split(const TimeSeries& ts, YearMonth boundary);

/// Affine map of the training range onto [0, 1]. Values outside the training
/// range map outside [0, 1].
class MinMaxScaler {
public:
    [[nodiscard]] static MinMaxScaler fit(const TimeSeries& train);
    [[nodiscard]] static MinMaxScaler fit(std::span<const double> train);

    [[nodiscard]] double lo() const { return lo_; }
    [[nodiscard]] double hi() const { return hi_; }

    [[nodiscard]] double transform(double x) const { return (x - lo_) / (hi_ - lo_); }
    [[nodiscard]] double inverse(double z) const { return lo_ + z * (hi_ - lo_); }
    [[nodiscard]] TimeSeries transform(const TimeSeries& ts) const;
    [[nodiscard]] TimeSeries inverse_transform(const TimeSeries& ts) const;
    [[nodiscard]] std::vector<double> transform(std::span<const double> xs) const;
    [[nodiscard]] std::vector<double> inverse_transform(std::span<const double> zs) const;

private:
    MinMaxScaler(double lo, double hi) : lo_(lo), hi_(hi) {}
    double lo_;
    double hi_;
};

/// Overlapping windows of length L with the following value as target.
struct WindowedDataset {
    std::size_t window_len = 0;
    std::vector<std::vector<double>> inputs;
    std::vector<double> targets;

    [[nodiscard]] std::size_t size() const { return targets.size(); }
};

[[nodiscard]] WindowedDataset make_windows(std::span<const double> values, std::size_t window_len);
[[nodiscard]] WindowedDataset make_windows(const TimeSeries& ts, std::size_t window_len);

/// Applies (1 - B)^d (1 - B^s)^D. The result starts d + D*s months later.
[[nodiscard]] TimeSeries difference(const TimeSeries& ts, int d, int seasonal_d, int season);
[[nodiscard]] std::vector<double> difference(std::span<const double> values, int d, int seasonal_d, int season);

/// Coefficients c_0..c_k of (1 - B)^d (1 - B^s)^D, with c_0 = 1.
[[nodiscard]] std::vector<double> differencing_polynomial(int d, int seasonal_d, int season);

/// Inverse of difference. `pivots` are the d + D*s values immediately
/// preceding the differenced segment; the result is pivots followed by the
/// reconstructed values.
[[nodiscard]] std::vector<double> integrate(std::span<const double> diffed,
                                            std::span<const double> pivots,
                                            int d, int seasonal_d, int season);
[[nodiscard]] TimeSeries integrate(const TimeSeries& diffed, std::span<const double> pivots,
                                   int d, int seasonal_d, int season);

struct DescriptiveStats {
    double min = 0;
    double q1 = 0;
    double median = 0;
    double mean = 0;
    double q3 = 0;
    double max = 0;
};

/// Quantile by linear interpolation between order statistics (R type 7).
[[nodiscard]] double quantile_type7(std::span<const double> values, double prob);
[[nodiscard]] DescriptiveStats descriptive_stats(std::span<const double> values);
[[nodiscard]] inline DescriptiveStats descriptive_stats(const TimeSeries& ts) { return descriptive_stats(ts.values()); }

} // namespace tsf
