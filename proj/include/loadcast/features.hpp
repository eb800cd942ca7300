#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "loadcast/calendar.hpp"
#include "loadcast/load_series.hpp"

namespace loadcast {

enum FeatureColumn : int {
    kLagWeek = 0,
    kLagDay,
    kTemperature,
    kDayIndicator,
    kWeekendFlag,
    kHolidayFlag,
    kSinWeek,
    kCosWeek,
    kSinDay,
    kCosDay,
    kFeatureCount
};

inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames{
    "lag_week_w", "lag_day_w", "temperature_c", "day_indicator", "weekend_flag",
    "holiday_flag", "sin_week",  "cos_week",      "sin_day",       "cos_day"};

struct FeatureRow {
    double lag_week_w = 0;
    double lag_day_w = 0;
    double temperature_c = 0;
    int day_indicator = 1;
    int weekend_flag = 0;
    int holiday_flag = 0;
    double sin_week = 0, cos_week = 1, sin_day = 0, cos_day = 1;
    double target_w = 0;
};

/// Feature rows on a uniform grid. `x` has one row per timestamp and kFeatureCount
/// columns; `target` holds the measured load, NaN where it lies beyond the load series.
struct FeatureMatrix {
    Timestamp start;
    std::int64_t step_seconds = 300;
    Eigen::MatrixXd x;
    std::vector<double> target;

    std::size_t rows() const { return target.size(); }
    Timestamp time_at(std::size_t i) const { return start + static_cast<std::int64_t>(i) * step_seconds; }
    std::optional<std::size_t> index_of(Timestamp t) const;
    FeatureRow row(std::size_t i) const;
};

/// Computes the ten calendar/lag/weather features for every grid time in [from, to).
///
/// Lags come from `load` at t - 7 d and t - 24 h, so load must start at least seven days
/// before `from` (ColdStartError otherwise, naming the first feasible time) and reach
/// t - 24 h for every row. Temperature is linearly interpolated from its own grid.
/// Sine/cosine phases are zero at local midnight and at Monday 00:00.
FeatureMatrix build_features(const LoadSeries& load, const LoadSeries& temperature,
                             const HolidaySet& holidays, Timestamp from, Timestamp to);

/// Calendar columns only (no lags, no temperature) for a single timestamp.
void calendar_features(Timestamp t, const HolidaySet& holidays, std::span<double> out);

/// Sample covariance with the 1/(n-1) normalisation.
double sample_covariance(std::span<const double> a, std::span<const double> b);
/// Pearson correlation cov(a,b)/(sd(a) sd(b)). Throws UndefinedMetricError for constant
/// input, ShapeError for length mismatch or fewer than two samples.
double pearson(std::span<const double> a, std::span<const double> b);

struct CorrelationReport {
    std::vector<std::string> features;  ///< row labels: the ten features plus the load itself
    std::vector<std::string> months;    ///< "YYYY-MM" column labels in chronological order
    std::vector<std::vector<std::optional<double>>> monthly;  ///< [feature][month]
    std::vector<std::optional<double>> overall;               ///< [feature]
};

/// Correlation of every feature with the target, per calendar month and over all rows.
/// Rows with unknown target are skipped; undefined cells are left empty.
CorrelationReport monthly_correlation_report(const FeatureMatrix& matrix);

} // namespace loadcast
