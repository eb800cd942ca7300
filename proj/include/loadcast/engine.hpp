#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "loadcast/forecaster.hpp"
#include "loadcast/metrics.hpp"

namespace loadcast {

struct EngineConfig {
    std::int64_t step_seconds = 300;
    std::size_t horizon_steps = 288;
    int window_days = 60;
    std::int64_t nn_refit_seconds = kSecondsPerDay;               ///< 300 refits at every step
    std::int64_t pslp_refit_second_of_day = 12 * kSecondsPerHour;
    int lead_in_days = 7;                                         ///< simulation starts this long after the data
    std::optional<std::size_t> max_steps;
    MapeMode mape_mode = MapeMode::Forecast;
    bool force_forecast = false;  ///< issue forecasts during cold start instead of abstaining
    bool keep_forecasts = false;
    std::uint64_t seed = 42;

    /// Throws ConfigError unless window >= 7 d + horizon, the horizon fits in 24 h and the
    /// cadences are multiples of the step.
    void validate() const;
    std::int64_t window_seconds() const { return window_days * kSecondsPerDay; }
    std::int64_t horizon_seconds() const { return static_cast<std::int64_t>(horizon_steps) * step_seconds; }
};

struct Readiness {
    bool ready = true;
    Timestamp first_feasible;
};

/// Neural and persistence forecasters need seven days of history (the weekly lag), PSLP one
/// observed day, SLP nothing.
Readiness cold_start_policy(ForecasterKind kind, Timestamp history_start, Timestamp now);

enum class AbstainReason { NotReady, NotFitted, Failed };
std::string to_string(AbstainReason reason);

/// A run of consecutive steps in which one forecaster issued nothing for the same reason.
struct Annotation {
    std::string forecaster;
    AbstainReason reason = AbstainReason::NotReady;
    Timestamp first;
    Timestamp last;
    std::size_t steps = 0;
    std::string message;
};

struct ForecastTrack {
    std::string name;
    ForecasterKind kind = ForecasterKind::Slp;
    std::vector<ErrorReport> reports;             ///< one per issuance, in time order
    std::vector<std::vector<double>> forecasts;   ///< parallel to reports when kept
    std::size_t abstained = 0;

    /// Forecast issued exactly at `t`, if one was kept.
    const std::vector<double>* forecast_at(Timestamp t) const;
};

struct SimulationRun {
    EngineConfig config;
    Timestamp first_step;
    std::size_t steps = 0;
    std::vector<ForecastTrack> tracks;
    std::vector<RefitRecord> refits;
    std::vector<Annotation> annotations;

    const ForecastTrack* track(const std::string& name) const;
};

using IssueHook = std::function<void(const std::string& forecaster, Timestamp issued_at, std::span<const double>)>;

/// Rolling-origin simulation. At every step t the roster sees only load before t, refits
/// as scheduled, issues a horizon forecast starting at t and is scored against the measured
/// load with the seven-day persistence as MASE reference. Steps run from the lead-in until
/// the last full horizon fits in the data. A forecaster that fails at a step is logged and
/// skipped for that step only.
SimulationRun run(const Dataset& data, const EngineConfig& config,
                  std::span<const std::unique_ptr<Forecaster>> roster, const IssueHook& hook = {});

enum class AdaptationPhase { Before, Spike, Adaptation, Adapted };
std::string to_string(AdaptationPhase phase);

struct AdaptationConfig {
    int pre_days = 7;
    int post_days = 14;
    double spike_factor = 3.0;   ///< MAE above spike_factor x pre-event mean counts as a spike
    double return_factor = 2.0;  ///< daily MAE below return_factor x pre-event mean counts as adapted
};

struct EventTrajectory {
    Date event;
    double pre_event_mae = 0.0;
    std::vector<Timestamp> issued_at;
    std::vector<double> mae;
    std::vector<AdaptationPhase> phase;
    bool spike = false;
    std::optional<Timestamp> adapted_at;
};

/// MAE trajectories of one forecaster around each event date. Throws DataError for events
/// whose pre-event window lies outside the forecaster's issued reports.
std::vector<EventTrajectory> adaptation_report(const SimulationRun& run, const std::string& forecaster,
                                               std::span<const Date> events, const AdaptationConfig& config = {});

} // namespace loadcast
