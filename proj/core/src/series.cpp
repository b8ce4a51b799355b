#include "tsf/series.hpp"

#include "tsf/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <stdexcept>

namespace tsf {

namespace {

std::string_view trim(std::string_view s) {
    constexpr std::string_view ws = " \t\r\n\"'";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == ',' && !quoted) {
            fields.push_back(trim(line.substr(start, i - start)));
            start = i + 1;
        }
    }
    fields.push_back(trim(line.substr(start)));
    return fields;
}

int parse_int(std::string_view s, std::string_view whole) {
    int out = 0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    if (ec != std::errc{} || ptr != end) {
        throw DataError("unparseable date '" + std::string(whole) + "'");
    }
    return out;
}

} // namespace

YearMonth YearMonth::parse(std::string_view text) {
    text = trim(text);
    // YYYY-MM or YYYY-MM-DD
    if (text.size() != 7 && text.size() != 10) {
        throw DataError("unparseable date '" + std::string(text) + "'");
    }
    if (text[4] != '-' || (text.size() == 10 && text[7] != '-')) {
        throw DataError("unparseable date '" + std::string(text) + "'");
    }
    const int y = parse_int(text.substr(0, 4), text);
    const int m = parse_int(text.substr(5, 2), text);
    if (m < 1 || m > 12) throw DataError("month out of range in '" + std::string(text) + "'");
    if (text.size() == 10) {
        const int d = parse_int(text.substr(8, 2), text);
        if (d < 1 || d > 31) throw DataError("day out of range in '" + std::string(text) + "'");
    }
    return YearMonth{y, m};
}

std::string YearMonth::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
    return buf;
}

TimeSeries::TimeSeries(YearMonth start, std::vector<double> values, int period)
    : start_(start), values_(std::move(values)), period_(period) {
    if (values_.empty()) throw std::invalid_argument("TimeSeries: values must be non-empty");
    if (period_ < 1) throw std::invalid_argument("TimeSeries: period must be >= 1");
    if (start_.month < 1 || start_.month > 12) throw std::invalid_argument("TimeSeries: invalid start month");
}

long TimeSeries::index_of(YearMonth m) const {
    const long off = m.ordinal() - start_.ordinal();
    if (off < 0 || off >= static_cast<long>(values_.size())) return -1;
    return off;
}

TimeSeries TimeSeries::with_values(std::vector<double> values) const {
    if (values.size() != values_.size()) {
        throw std::invalid_argument("TimeSeries::with_values: length mismatch");
    }
    return TimeSeries(start_, std::move(values), period_);
}

TimeSeries load_csv(const std::filesystem::path& path, std::string_view value_column,
                    std::string_view date_column, int period) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open data file: " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw DataError("empty CSV file: " + path.string());
    const auto header = split_csv_line(line);
    const auto find_col = [&](std::string_view name) -> std::size_t {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw DataError("column '" + std::string(name) + "' not found in " + path.string());
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t vcol = find_col(value_column);
    const std::size_t dcol = find_col(date_column);

    std::map<YearMonth, double> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() <= std::max(vcol, dcol)) {
            throw DataError("line " + std::to_string(lineno) + ": too few fields");
        }
        const YearMonth ym = YearMonth::parse(fields[dcol]);
        const std::string vtext(fields[vcol]);
        double v = 0;
        std::size_t used = 0;
        try {
            v = std::stod(vtext, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != vtext.size() || !std::isfinite(v) || v < 0) {
            throw DataError("line " + std::to_string(lineno) + ": invalid value '" + vtext + "'");
        }
        if (!rows.emplace(ym, v).second) {
            throw DataError("duplicate month " + ym.to_string());
        }
    }
    if (rows.empty()) throw DataError("no data rows in " + path.string());

    std::vector<double> values;
    values.reserve(rows.size());
    YearMonth expected = rows.begin()->first;
    for (const auto& [ym, v] : rows) {
        if (ym != expected) throw DataError("gap in monthly sequence: missing " + expected.to_string());
        values.push_back(v);
        expected = expected.plus(1);
    }
    return TimeSeries(rows.begin()->first, std::move(values), period);
}

std::pair<TimeSeries, TimeSeries> train_test_split(const TimeSeries& ts, YearMonth boundary) {
    const long idx = ts.index_of(boundary);
    if (idx < 0 || idx + 1 >= static_cast<long>(ts.size())) {
        throw std::invalid_argument("train_test_split: boundary " + boundary.to_string() +
                                    " must lie strictly inside " + ts.start().to_string() + ".." +
                                    ts.last().to_string());
    }
    const auto v = ts.values();
    const auto cut = static_cast<std::size_t>(idx) + 1;
    return {TimeSeries(ts.start(), {v.begin(), v.begin() + static_cast<long>(cut)}, ts.period()),
            TimeSeries(ts.month_at(cut), {v.begin() + static_cast<long>(cut), v.end()}, ts.period())};
}

MinMaxScaler MinMaxScaler::fit(std::span<const double> train) {
    if (train.empty()) throw std::invalid_argument("MinMaxScaler: empty training data");
    const auto [lo, hi] = std::minmax_element(train.begin(), train.end());
    if (!(*hi > *lo)) throw std::invalid_argument("MinMaxScaler: constant series cannot be scaled");
    return MinMaxScaler(*lo, *hi);
}

MinMaxScaler MinMaxScaler::fit(const TimeSeries& train) { return fit(train.values()); }

std::vector<double> MinMaxScaler::transform(std::span<const double> xs) const {
    std::vector<double> out(xs.size());
    std::transform(xs.begin(), xs.end(), out.begin(), [this](double x) { return transform(x); });
    return out;
}

std::vector<double> MinMaxScaler::inverse_transform(std::span<const double> zs) const {
    std::vector<double> out(zs.size());
    std::transform(zs.begin(), zs.end(), out.begin(), [this](double z) { return inverse(z); });
    return out;
}

TimeSeries MinMaxScaler::transform(const TimeSeries& ts) const { return ts.with_values(transform(ts.values())); }

TimeSeries MinMaxScaler::inverse_transform(const TimeSeries& ts) const {
    return ts.with_values(inverse_transform(ts.values()));
}

WindowedDataset make_windows(std::span<const double> values, std::size_t window_len) {
    if (window_len < 1) throw std::invalid_argument("make_windows: window length must be >= 1");
    if (values.size() <= window_len) {
        throw std::invalid_argument("make_windows: series of length " + std::to_string(values.size()) +
                                    " is too short for window " + std::to_string(window_len));
    }
    WindowedDataset ds;
    ds.window_len = window_len;
    const std::size_t n = values.size() - window_len;
    ds.inputs.reserve(n);
    ds.targets.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        ds.inputs.emplace_back(values.begin() + static_cast<long>(i),
                               values.begin() + static_cast<long>(i + window_len));
        ds.targets.push_back(values[i + window_len]);
    }
    return ds;
}

WindowedDataset make_windows(const TimeSeries& ts, std::size_t window_len) {
    return make_windows(ts.values(), window_len);
}

std::vector<double> differencing_polynomial(int d, int seasonal_d, int season) {
    if (d < 0 || seasonal_d < 0 || season < 1) throw std::invalid_argument("differencing orders must be >= 0");
    std::vector<double> poly{1.0};
    const auto multiply = [&poly](std::size_t lag) {
        std::vector<double> out(poly.size() + lag, 0.0);
        for (std::size_t i = 0; i < poly.size(); ++i) {
            out[i] += poly[i];
            out[i + lag] -= poly[i];
        }
        poly = std::move(out);
    };
    for (int i = 0; i < d; ++i) multiply(1);
    for (int i = 0; i < seasonal_d; ++i) multiply(static_cast<std::size_t>(season));
    return poly;
}

std::vector<double> difference(std::span<const double> values, int d, int seasonal_d, int season) {
    const auto poly = differencing_polynomial(d, seasonal_d, season);
    const std::size_t k = poly.size() - 1;
    if (values.size() <= k) {
        throw std::invalid_argument("difference: series length " + std::to_string(values.size()) +
                                    " must exceed d + D*s = " + std::to_string(k));
    }
    std::vector<double> out(values.size() - k);
    for (std::size_t t = k; t < values.size(); ++t) {
        double acc = 0.0;
        for (std::size_t j = 0; j <= k; ++j) {
            if (poly[j] != 0.0) acc += poly[j] * values[t - j];
        }
        out[t - k] = acc;
    }
    return out;
}

TimeSeries difference(const TimeSeries& ts, int d, int seasonal_d, int season) {
    auto out = difference(ts.values(), d, seasonal_d, season);
    const long k = static_cast<long>(ts.size() - out.size());
    return TimeSeries(ts.start().plus(k), std::move(out), ts.period());
}

std::vector<double> integrate(std::span<const double> diffed, std::span<const double> pivots, int d,
                              int seasonal_d, int season) {
    const auto poly = differencing_polynomial(d, seasonal_d, season);
    const std::size_t k = poly.size() - 1;
    if (pivots.size() != k) {
        throw std::invalid_argument("integrate: expected " + std::to_string(k) + " pivots, got " +
                                    std::to_string(pivots.size()));
    }
    std::vector<double> out(pivots.begin(), pivots.end());
    out.reserve(k + diffed.size());
    for (std::size_t i = 0; i < diffed.size(); ++i) {
        const std::size_t t = k + i;
        double acc = diffed[i];
        for (std::size_t j = 1; j <= k; ++j) {
            if (poly[j] != 0.0) acc -= poly[j] * out[t - j];
        }
        out.push_back(acc);
    }
    return out;
}

TimeSeries integrate(const TimeSeries& diffed, std::span<const double> pivots, int d, int seasonal_d,
                     int season) {
    auto out = integrate(diffed.values(), pivots, d, seasonal_d, season);
    return TimeSeries(diffed.start().plus(-static_cast<long>(pivots.size())), std::move(out), diffed.period());
}

double quantile_type7(std::span<const double> values, double prob) {
    if (values.empty()) throw std::invalid_argument("quantile: empty input");
    if (prob < 0.0 || prob > 1.0) throw std::invalid_argument("quantile: probability outside [0, 1]");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double h = (static_cast<double>(sorted.size()) - 1.0) * prob;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

DescriptiveStats descriptive_stats(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("descriptive_stats: empty input");
    DescriptiveStats s;
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    s.min = *lo;
    s.max = *hi;
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    s.q1 = quantile_type7(values, 0.25);
    s.median = quantile_type7(values, 0.5);
    s.q3 = quantile_type7(values, 0.75);
    return s;
}

} // namespace tsf
