#include "tsf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tsf::metrics {

namespace {

void check(std::span<const double> a, std::span<const double> p, const char* who) {
    if (a.size() != p.size()) throw std::invalid_argument(std::string(who) + ": length mismatch");
    if (a.empty()) throw std::invalid_argument(std::string(who) + ": empty input");
}

} // namespace

std::string to_string(Scale s) { return s == Scale::normalized ? "normalized" : "original"; }

double mse(std::span<const double> actual, std::span<const double> predicted) {
    check(actual, predicted, "mse");
    double acc = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double e = actual[i] - predicted[i];
        acc += e * e;
    }
    return acc / static_cast<double>(actual.size());
}

double mae(std::span<const double> actual, std::span<const double> predicted) {
    check(actual, predicted, "mae");
    double acc = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) acc += std::abs(actual[i] - predicted[i]);
    return acc / static_cast<double>(actual.size());
}

GmraeResult gmrae(std::span<const double> actual, std::span<const double> predicted) {
    check(actual, predicted, "gmrae");
    GmraeResult out;
    double acc = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        double rel = actual[i] == 0.0 ? 0.0 : std::abs((actual[i] - predicted[i]) / actual[i]);
        if (!(rel >= kGmraeFloor)) {
            rel = kGmraeFloor;
            ++out.floored_terms;
        }
        acc += std::log(rel);
    }
    out.value = std::exp(acc / static_cast<double>(actual.size()));
    out.undefined = out.floored_terms == actual.size();
    return out;
}

double theil_u1(std::span<const double> actual, std::span<const double> predicted) {
    check(actual, predicted, "theil_u1");
    const double n = static_cast<double>(actual.size());
    double se = 0.0, sa = 0.0, sp = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double e = actual[i] - predicted[i];
        se += e * e;
        sa += actual[i] * actual[i];
        sp += predicted[i] * predicted[i];
    }
    const double denom = std::sqrt(sa / n) + std::sqrt(sp / n);
    if (!(denom > 0.0)) throw std::invalid_argument("theil_u1: actual and predicted are both all-zero");
    return std::clamp(std::sqrt(se / n) / denom, 0.0, 1.0);
}

MetricReport evaluate(std::span<const double> actual, std::span<const double> predicted, Scale scale) {
    MetricReport r;
    r.n = actual.size();
    r.scale = scale;
    r.mse = mse(actual, predicted);
    r.mae = mae(actual, predicted);
    const auto g = gmrae(actual, predicted);
    r.gmrae = g.value;
    r.gmrae_undefined = g.undefined;
    r.gmrae_floored = g.floored_terms;
    r.theil_u1 = theil_u1(actual, predicted);
    return r;
}

} // namespace tsf::metrics
