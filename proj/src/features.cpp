#include "loadcast/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include <fmt/format.h>

#include "loadcast/errors.hpp"

namespace loadcast {

std::optional<std::size_t> FeatureMatrix::index_of(Timestamp t) const {
    if (t < start) return std::nullopt;
    const auto off = t - start;
    if (off % step_seconds != 0) return std::nullopt;
    const auto i = static_cast<std::size_t>(off / step_seconds);
    if (i >= rows()) return std::nullopt;
    return i;
}

FeatureRow FeatureMatrix::row(std::size_t i) const {
    const auto r = static_cast<Eigen::Index>(i);
    FeatureRow f;
    f.lag_week_w = x(r, kLagWeek);
    f.lag_day_w = x(r, kLagDay);
    f.temperature_c = x(r, kTemperature);
    f.day_indicator = static_cast<int>(x(r, kDayIndicator));
    f.weekend_flag = static_cast<int>(x(r, kWeekendFlag));
    f.holiday_flag = static_cast<int>(x(r, kHolidayFlag));
    f.sin_week = x(r, kSinWeek);
    f.cos_week = x(r, kCosWeek);
    f.sin_day = x(r, kSinDay);
    f.cos_day = x(r, kCosDay);
    f.target_w = target[i];
    return f;
}

void calendar_features(Timestamp t, const HolidaySet& holidays, std::span<double> out) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const int wd = t.weekday();
    out[kDayIndicator] = wd;
    out[kWeekendFlag] = wd >= 6 ? 1.0 : 0.0;
    out[kHolidayFlag] = holidays.contains(t.date()) ? 1.0 : 0.0;
    const double week_phase = two_pi * static_cast<double>(t.second_of_week()) / kSecondsPerWeek;
    const double day_phase = two_pi * static_cast<double>(t.second_of_day()) / kSecondsPerDay;
    out[kSinWeek] = std::sin(week_phase);
    out[kCosWeek] = std::cos(week_phase);
    out[kSinDay] = std::sin(day_phase);
    out[kCosDay] = std::cos(day_phase);
}

FeatureMatrix build_features(const LoadSeries& load, const LoadSeries& temperature,
                             const HolidaySet& holidays, Timestamp from, Timestamp to) {
    if (load.empty()) throw DataError("build_features: empty load series");
    if (to < from) throw ConfigError("build_features: range end before start");
    const auto step = load.step_seconds;
    if ((from - load.start) % step != 0)
        throw ConfigError(fmt::format("build_features: {} is not on the load grid", from.iso()));
    const Timestamp first_feasible = load.start + kSecondsPerWeek;
    if (from < first_feasible)
        throw ColdStartError(fmt::format("build_features: need 7 days of load history before {}; "
                                         "first feasible timestamp is {}",
                                         from.iso(), first_feasible.iso()),
                             first_feasible);

    const auto n = static_cast<std::size_t>((to - from + step - 1) / step);
    FeatureMatrix fm;
    fm.start = from;
    fm.step_seconds = step;
    fm.x.resize(static_cast<Eigen::Index>(n), kFeatureCount);
    fm.target.assign(n, std::nan(""));
    if (n > 0 && !load.covers(fm.time_at(n - 1) - kSecondsPerDay))
        throw DataError(fmt::format("build_features: load series ends at {}, rows up to {} need "
                                    "the day-before value",
                                    load.end().iso(), fm.time_at(n - 1).iso()));

    std::array<double, kFeatureCount> buf{};
    for (std::size_t i = 0; i < n; ++i) {
        const Timestamp t = fm.time_at(i);
        const auto r = static_cast<Eigen::Index>(i);
        calendar_features(t, holidays, buf);
        buf[kLagWeek] = load.at(t - kSecondsPerWeek);
        buf[kLagDay] = load.at(t - kSecondsPerDay);
        buf[kTemperature] = temperature.interpolate(t);
        for (int c = 0; c < kFeatureCount; ++c) fm.x(r, c) = buf[static_cast<std::size_t>(c)];
        if (auto idx = load.index_of(t)) fm.target[i] = load.values[*idx];
    }
    return fm;
}

double sample_covariance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ShapeError("covariance: length mismatch");
    if (a.size() < 2) throw ShapeError("covariance: need at least two samples");
    const double n = static_cast<double>(a.size());
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - ma) * (b[i] - mb);
    return s / (n - 1.0);
}

double pearson(std::span<const double> a, std::span<const double> b) {
    const double cov = sample_covariance(a, b);
    const double sa = std::sqrt(sample_covariance(a, a));
    const double sb = std::sqrt(sample_covariance(b, b));
    if (sa == 0.0 || sb == 0.0) throw UndefinedMetricError("pearson: constant sequence");
    return std::clamp(cov / (sa * sb), -1.0, 1.0);
}

CorrelationReport monthly_correlation_report(const FeatureMatrix& matrix) {
    CorrelationReport report;
    for (auto name : kFeatureNames) report.features.emplace_back(name);
    report.features.emplace_back("load_w");
    const std::size_t columns = report.features.size();

    // Column-wise samples per month, target last.
    std::map<std::pair<int, unsigned>, std::vector<std::vector<double>>> groups;
    std::vector<std::vector<double>> all(columns);
    for (std::size_t i = 0; i < matrix.rows(); ++i) {
        if (std::isnan(matrix.target[i])) continue;
        const Date d = matrix.time_at(i).date();
        auto& g = groups[{d.year, d.month}];
        if (g.empty()) g.resize(columns);
        for (std::size_t c = 0; c < columns; ++c) {
            const double v = c + 1 == columns ? matrix.target[i]
                                               : matrix.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
            g[c].push_back(v);
            all[c].push_back(v);
        }
    }

    auto correlate = [&](const std::vector<std::vector<double>>& cols, std::size_t c) -> std::optional<double> {
        try {
            return pearson(cols[c], cols[columns - 1]);
        } catch (const Error&) {
            return std::nullopt;
        }
    };

    report.monthly.assign(columns, {});
    for (const auto& [key, cols] : groups) {
        report.months.push_back(fmt::format("{:04d}-{:02d}", key.first, key.second));
        for (std::size_t c = 0; c < columns; ++c) report.monthly[c].push_back(correlate(cols, c));
    }
    for (std::size_t c = 0; c < columns; ++c)
        report.overall.push_back(all.front().size() >= 2 ? correlate(all, c) : std::nullopt);
    return report;
}

} // namespace loadcast
