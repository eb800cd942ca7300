#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "loadcast/calendar.hpp"
#include "loadcast/load_series.hpp"

namespace loadcast {

inline constexpr double kStationMaxW = 22000.0;
inline constexpr double kMinBatteryKwh = 18.7;
inline constexpr double kMaxBatteryKwh = 100.0;
/// Excess below this is rounding in the capacity split, not an overload.
inline constexpr double kOverloadToleranceW = 1e-6;

struct Vehicle {
    double battery_kwh = 50.0;
    double max_charge_w = 11000.0;
};

struct Session {
    int id = 0;
    int profile = -1;  ///< driver profile index, -1 for weekend visitors
    Vehicle vehicle;
    Timestamp arrival;
    Timestamp departure;
    double soc_in = 0.0;
};

struct DriverProfile {
    int id = 0;
    double commute_km = 0.0;                 ///< one way
    std::int64_t arrival_offset_s = 0;       ///< after the building's load rise
    std::int64_t departure_offset_s = 0;     ///< before the building's load fall
    Vehicle vehicle;
};

/// Time of day at which the building's weekday load rises above / falls below the midpoint
/// between its night base and its daytime peak.
struct WorkingHours {
    std::int64_t rise_second_of_day = 7 * kSecondsPerHour;
    std::int64_t fall_second_of_day = 18 * kSecondsPerHour;
};

WorkingHours detect_working_hours(const LoadSeries& load, const HolidaySet& holidays);

struct SessionGenConfig {
    std::size_t profiles = 10;
    double min_commute_km = 10.0;
    double max_commute_km = 100.0;
    double consumption_kwh_per_100km = 18.0;
    std::int64_t max_arrival_offset_s = 2 * kSecondsPerHour;
    std::int64_t max_departure_offset_s = 2 * kSecondsPerHour;
    std::int64_t daily_jitter_s = 30 * 60;  ///< uniform daily shift of every profile's times
    double weekend_probability = 0.05;      ///< per visitor and hour
    std::size_t weekend_visitors = 10;
    int weekend_first_hour = 8;
    int weekend_last_hour = 22;             ///< last arrival hour is weekend_last_hour - 1
    double weekend_soc_min = 0.05;
    double weekend_soc_max = 0.20;
    double weekend_stay_min_h = 1.0;
    double weekend_stay_max_h = 3.0;
    std::int64_t step_seconds = 300;        ///< arrivals and departures snap to this grid
    std::uint64_t seed = 42;

    void validate() const;
};

/// Random commuter profiles: distances, time offsets and vehicles (battery 18.7-100 kWh,
/// 11 or 22 kW). Profile 0 has no arrival offset and the last profile no departure offset.
std::vector<DriverProfile> random_driver_profiles(const SessionGenConfig& config);

/// Weekday sessions for every profile with a fresh daily offset, except that profile 0 always
/// arrives exactly at the load rise and the last profile always leaves exactly at the load
/// fall. Commuters arrive with soc 1 - 2 * distance * consumption / battery (clamped to
/// [0.05, 1]). On weekends and holidays each visitor arrives in each hour of the configured
/// window with `weekend_probability`, with soc uniform in [weekend_soc_min, weekend_soc_max].
std::vector<Session> generate_sessions(std::span<const DriverProfile> profiles, Date first_day, Date last_day,
                                       const WorkingHours& hours, const HolidaySet& holidays,
                                       const SessionGenConfig& config);

/// Splits `capacity` in proportion to `weights`; recipients hitting their cap are fixed at it
/// and the remainder is redistributed among the others until nothing is left or all are capped.
std::vector<double> water_fill(double capacity, std::span<const double> weights, std::span<const double> caps);

/// A connected vehicle as seen by the planner.
struct ConnectedVehicle {
    Vehicle vehicle;
    double soc = 0.0;
    Timestamp connected_since;
    Timestamp departure;
};

/// Per-station power (W) per slot: power[slot][vehicle].
struct Schedule {
    Timestamp start;
    std::int64_t step_seconds = 300;
    std::vector<std::vector<double>> power;
};

/// Power each vehicle would draw without coordination: the full rate until full.
double uncontrolled_power(const Vehicle& vehicle, double soc, std::int64_t step_seconds);

/// Plans charging inside limit - forecast. Every slot splits max(0, limit - forecast) by
/// water-filling with weights (1 - soc) * (1 + hours connected), capped by the vehicle and
/// station rates and by the energy still missing; vehicles are only planned before their
/// departure. Throws DataError on an empty forecast.
Schedule grid_oriented_schedule(std::span<const double> forecast_w, Timestamp start, std::int64_t step_seconds,
                                std::span<const ConnectedVehicle> vehicles, double limit_w);

enum class Strategy { Uncontrolled, GridOriented };
std::string to_string(Strategy s);
Strategy parse_strategy(const std::string& text);

struct Scenario {
    std::size_t stations = 2;
    Strategy strategy = Strategy::Uncontrolled;
    double limit_w = 110000.0;
};

/// Building-load forecast issued at `now` (values from `now` on), or nothing when no
/// forecast exists for that instant.
using ForecastProvider = std::function<std::optional<std::vector<double>>(Timestamp now)>;

struct SessionOutcome {
    Session session;
    int station = -1;                  ///< -1 if the vehicle never got a station
    std::optional<Timestamp> connected;
    double delivered_kwh = 0.0;
    std::int64_t charging_seconds = 0;  ///< time with power > 0
    double soc_out = 0.0;
};

/// Counts 5-minute steps in which building + charging power exceeds the limit by more than
/// kOverloadToleranceW.
struct OverloadStats {
    std::size_t registered_overloads = 0;
    double max_overload_w = 0.0;
    double mean_overload_w = 0.0;
    std::size_t sessions_charged = 0;
    double avg_energy_kwh = 0.0;
    double avg_charging_seconds = 0.0;
};

struct ScenarioResult {
    Scenario scenario;
    OverloadStats stats;
    std::vector<SessionOutcome> sessions;
    LoadSeries charging_w;  ///< total charging power per step
    std::size_t unplanned_steps = 0;  ///< grid-oriented steps without a forecast (charged uncontrolled)
};

/// Steps through [from, to) on the building grid. Stations serve one session at a time;
/// vehicles queue in arrival order and hold their station until departure. The grid-oriented
/// strategy replans at every step from the forecast issued at that step and applies the first
/// slot of the plan; without a forecast it falls back to uncontrolled charging.
ScenarioResult simulate(const Scenario& scenario, std::span<const Session> sessions, const LoadSeries& building,
                        const ForecastProvider& forecasts, Timestamp from, Timestamp to);

/// Limit such that the measured peak is 80 % of it, rounded up to whole 10 kW.
double derive_grid_limit(const LoadSeries& building);

} // namespace loadcast
