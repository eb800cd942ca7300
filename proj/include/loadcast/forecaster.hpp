#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "loadcast/calendar.hpp"
#include "loadcast/features.hpp"
#include "loadcast/load_series.hpp"

namespace loadcast {

/// Measured load, temperature and holidays for one building.
struct Dataset {
    LoadSeries load;
    LoadSeries temperature;
    HolidaySet holidays;
};

/// What a forecaster may see at simulation time `now`: measured load strictly before `now`,
/// feature rows up to 24 h ahead (their lags are at least 24 h old) and the calendar.
class StepView {
public:
    StepView(const Dataset& data, const FeatureMatrix& features, Timestamp now, std::int64_t window_seconds,
             std::size_t horizon);

    Timestamp now() const { return now_; }
    std::int64_t step_seconds() const { return data_.load.step_seconds; }
    std::size_t horizon() const { return horizon_; }
    const HolidaySet& holidays() const { return data_.holidays; }
    /// max(now - window, first measurement): the oldest sample training may use.
    Timestamp window_start() const { return window_start_; }

    Timestamp history_start() const { return data_.load.start; }
    /// Load values in [history_start, now).
    std::span<const double> history() const { return history_; }
    /// Measured load in [max(from, history_start), now).
    LoadSeries history_series(Timestamp from) const;

    Timestamp features_start() const { return features_.start; }
    /// Feature rows for grid times in [from, to). Throws ColdStartError when `from` precedes
    /// the first feature row and ConfigError when `to` reaches more than 24 h past `now`.
    Eigen::MatrixXd feature_rows(Timestamp from, Timestamp to) const;

private:
    const Dataset& data_;
    const FeatureMatrix& features_;
    Timestamp now_;
    Timestamp window_start_;
    std::size_t horizon_;
    std::span<const double> history_;
};

/// One training or profile refresh, as audited by the engine.
struct RefitRecord {
    std::string forecaster;
    Timestamp issued_at;
    std::string action;  ///< "train", "refit" or "profile"
    Timestamp first_sample;
    Timestamp last_sample;
    std::size_t samples = 0;
    int epochs = 0;
    double loss = 0.0;
};

enum class ForecasterKind { Slp, Pslp, Neural, Reference };

class Forecaster {
public:
    virtual ~Forecaster() = default;
    virtual std::string name() const = 0;
    virtual ForecasterKind kind() const = 0;
    /// Performs any refit due at view.now(). May throw ColdStartError when it lacks data.
    virtual void update(const StepView& view, std::vector<RefitRecord>& log) = 0;
    /// False while the forecaster has never been fitted.
    virtual bool fitted() const { return true; }
    /// `steps` values starting at view.now().
    virtual std::vector<double> forecast(const StepView& view, std::size_t steps) = 0;
};

} // namespace loadcast
