#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "loadcast/time.hpp"

namespace loadcast {

/// MAPE denominator. `Forecast` divides each residual by the forecast value; `Actual` is the
/// conventional MAPE.
enum class MapeMode { Forecast, Actual };

double mae(std::span<const double> forecast, std::span<const double> actual);
double rmse(std::span<const double> forecast, std::span<const double> actual);

struct MapeResult {
    double percent = 0.0;
    std::size_t excluded = 0;  ///< steps skipped because their denominator was zero
};

/// Throws UndefinedMetricError when every step has a zero denominator.
MapeResult mape(std::span<const double> forecast, std::span<const double> actual,
                MapeMode mode = MapeMode::Forecast);

/// MAE(forecast) / ((1/(h-1)) * sum |actual - naive|), where naive is the load seven days
/// earlier. A persistence forecast scores exactly (h-1)/h. Requires h >= 2; throws
/// UndefinedMetricError when the naive error is zero everywhere.
double mase(std::span<const double> forecast, std::span<const double> actual, std::span<const double> naive);

struct ErrorReport {
    Timestamp issued_at;
    std::size_t h = 0;
    double mae_w = 0.0;
    double rmse_w = 0.0;
    std::optional<double> mape_pct;
    std::optional<double> mase;
    std::size_t mape_excluded = 0;
};

/// All four metrics for one issuance. Undefined MAPE/MASE are left empty instead of throwing;
/// an empty `naive` span skips MASE.
ErrorReport evaluate(Timestamp issued_at, std::span<const double> forecast, std::span<const double> actual,
                     std::span<const double> naive, MapeMode mode = MapeMode::Forecast);

struct BoxplotSummary {
    std::size_t n = 0;
    double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
    double lower_whisker = 0, upper_whisker = 0;  ///< last datum within 1.5 IQR of the box
    std::size_t outliers = 0;
};

/// Linearly interpolated quantile (position q * (n - 1) in the sorted sample).
double quantile(std::span<const double> sorted, double q);
BoxplotSummary boxplot_summary(std::span<const double> values);

struct MetricAverages {
    std::size_t count = 0;
    double mae_w = 0.0;
    double rmse_w = 0.0;
    std::optional<double> mape_pct;  ///< mean over issuances where it is defined
    std::optional<double> mase;
};

MetricAverages aggregate(std::span<const ErrorReport> reports);

} // namespace loadcast
