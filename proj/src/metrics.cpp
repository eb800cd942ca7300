#include "loadcast/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "loadcast/errors.hpp"

namespace loadcast {

namespace {

void check_lengths(std::span<const double> a, std::span<const double> b, const char* what) {
    if (a.size() != b.size())
        throw ShapeError(fmt::format("{}: length mismatch ({} vs {})", what, a.size(), b.size()));
    if (a.empty()) throw ShapeError(fmt::format("{}: empty horizon", what));
}

} // namespace

double mae(std::span<const double> forecast, std::span<const double> actual) {
    check_lengths(forecast, actual, "mae");
    double s = 0.0;
    for (std::size_t i = 0; i < forecast.size(); ++i) s += std::abs(forecast[i] - actual[i]);
    return s / static_cast<double>(forecast.size());
}

double rmse(std::span<const double> forecast, std::span<const double> actual) {
    check_lengths(forecast, actual, "rmse");
    double s = 0.0;
    for (std::size_t i = 0; i < forecast.size(); ++i) {
        const double e = forecast[i] - actual[i];
        s += e * e;
    }
    return std::sqrt(s / static_cast<double>(forecast.size()));
}

MapeResult mape(std::span<const double> forecast, std::span<const double> actual, MapeMode mode) {
    check_lengths(forecast, actual, "mape");
    MapeResult r;
    double s = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < forecast.size(); ++i) {
        const double denom = mode == MapeMode::Forecast ? forecast[i] : actual[i];
        if (denom == 0.0) {
            ++r.excluded;
            continue;
        }
        s += std::abs((forecast[i] - actual[i]) / denom);
        ++used;
    }
    if (used == 0) throw UndefinedMetricError("mape: every step has a zero denominator");
    r.percent = 100.0 * s / static_cast<double>(used);
    return r;
}

double mase(std::span<const double> forecast, std::span<const double> actual, std::span<const double> naive) {
    check_lengths(forecast, actual, "mase");
    check_lengths(naive, actual, "mase");
    const std::size_t h = actual.size();
    if (h < 2) throw ShapeError("mase: horizon must have at least two steps");
    double naive_sum = 0.0;
    for (std::size_t i = 0; i < h; ++i) naive_sum += std::abs(actual[i] - naive[i]);
    if (naive_sum == 0.0) throw UndefinedMetricError("mase: actual equals the 7-day lag everywhere");
    return mae(forecast, actual) / (naive_sum / static_cast<double>(h - 1));
}

ErrorReport evaluate(Timestamp issued_at, std::span<const double> forecast, std::span<const double> actual,
                     std::span<const double> naive, MapeMode mode) {
    ErrorReport r;
    r.issued_at = issued_at;
    r.h = forecast.size();
    r.mae_w = mae(forecast, actual);
    r.rmse_w = rmse(forecast, actual);
    try {
        auto m = mape(forecast, actual, mode);
        r.mape_pct = m.percent;
        r.mape_excluded = m.excluded;
    } catch (const UndefinedMetricError&) {
        r.mape_excluded = forecast.size();
    }
    if (!naive.empty() && forecast.size() >= 2) {
        try {
            r.mase = mase(forecast, actual, naive);
        } catch (const UndefinedMetricError&) {
        }
    }
    return r;
}

double quantile(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw ShapeError("quantile: empty sample");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

BoxplotSummary boxplot_summary(std::span<const double> values) {
    if (values.empty()) throw ShapeError("boxplot_summary: empty input");
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    BoxplotSummary b;
    b.n = v.size();
    b.min = v.front();
    b.max = v.back();
    b.q1 = quantile(v, 0.25);
    b.median = quantile(v, 0.5);
    b.q3 = quantile(v, 0.75);
    const double iqr = b.q3 - b.q1;
    const double lo_fence = b.q1 - 1.5 * iqr;
    const double hi_fence = b.q3 + 1.5 * iqr;
    b.lower_whisker = b.q1;
    b.upper_whisker = b.q3;
    for (double x : v) {
        if (x < lo_fence || x > hi_fence) {
            ++b.outliers;
            continue;
        }
        b.lower_whisker = std::min(b.lower_whisker, x);
        b.upper_whisker = std::max(b.upper_whisker, x);
    }
    return b;
}

MetricAverages aggregate(std::span<const ErrorReport> reports) {
    MetricAverages a;
    a.count = reports.size();
    if (reports.empty()) return a;
    double mape_sum = 0.0, mase_sum = 0.0;
    std::size_t mape_n = 0, mase_n = 0;
    for (const auto& r : reports) {
        a.mae_w += r.mae_w;
        a.rmse_w += r.rmse_w;
        if (r.mape_pct) {
            mape_sum += *r.mape_pct;
            ++mape_n;
        }
        if (r.mase) {
            mase_sum += *r.mase;
            ++mase_n;
        }
    }
    a.mae_w /= static_cast<double>(reports.size());
    a.rmse_w /= static_cast<double>(reports.size());
    if (mape_n) a.mape_pct = mape_sum / static_cast<double>(mape_n);
    if (mase_n) a.mase = mase_sum / static_cast<double>(mase_n);
    return a;
}

} // namespace loadcast
