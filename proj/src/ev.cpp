#include "loadcast/ev.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include <fmt/format.h>

#include "loadcast/errors.hpp"
#include "loadcast/random.hpp"

namespace loadcast {

namespace {

Vehicle random_vehicle(Rng& rng) {
    Vehicle v;
    v.battery_kwh = std::round(rng.uniform(kMinBatteryKwh, kMaxBatteryKwh) * 10.0) / 10.0;
    v.max_charge_w = rng.bernoulli(0.5) ? 22000.0 : 11000.0;
    return v;
}

Timestamp snap(Timestamp t, std::int64_t step) {
    const std::int64_t s = t.epoch_seconds();
    return Timestamp(floor_div(s + step / 2, step) * step);
}

double station_rate(const Vehicle& v) { return std::min(v.max_charge_w, kStationMaxW); }

} // namespace

WorkingHours detect_working_hours(const LoadSeries& load, const HolidaySet& holidays) {
    if (load.empty()) throw DataError("working hours: empty load series");
    if (kSecondsPerDay % load.step_seconds != 0) throw ConfigError("working hours: step must divide a day");
    const auto slots = static_cast<std::size_t>(kSecondsPerDay / load.step_seconds);
    std::vector<double> sum(slots, 0.0);
    std::vector<std::size_t> count(slots, 0);
    for (std::size_t i = 0; i < load.size(); ++i) {
        const Timestamp t = load.time_at(i);
        const Date d = t.date();
        if (d.weekday() > 5 || holidays.contains(d)) continue;
        const auto slot = static_cast<std::size_t>(t.second_of_day() / load.step_seconds);
        sum[slot] += load.values[i];
        ++count[slot];
    }
    std::vector<double> mean(slots, 0.0);
    for (std::size_t s = 0; s < slots; ++s) {
        if (count[s] == 0) throw DataError("working hours: load does not cover every time of day on weekdays");
        mean[s] = sum[s] / static_cast<double>(count[s]);
    }
    const auto [lo, hi] = std::minmax_element(mean.begin(), mean.end());
    const double threshold = 0.5 * (*lo + *hi);
    std::size_t rise = 0;
    while (rise < slots && mean[rise] < threshold) ++rise;
    std::size_t fall = slots;
    while (fall > 0 && mean[fall - 1] < threshold) --fall;
    return WorkingHours{static_cast<std::int64_t>(rise) * load.step_seconds,
                        static_cast<std::int64_t>(fall) * load.step_seconds};
}

void SessionGenConfig::validate() const {
    if (profiles < 1) throw ConfigError("at least one driver profile is needed");
    if (min_commute_km < 0 || max_commute_km < min_commute_km) throw ConfigError("invalid commute distance range");
    if (consumption_kwh_per_100km <= 0) throw ConfigError("consumption must be positive");
    if (weekend_probability < 0 || weekend_probability > 1) throw ConfigError("weekend probability must be in [0, 1]");
    if (weekend_first_hour < 0 || weekend_last_hour > 24 || weekend_first_hour >= weekend_last_hour)
        throw ConfigError("invalid weekend hour window");
    if (weekend_soc_min < 0 || weekend_soc_max > 1 || weekend_soc_min > weekend_soc_max)
        throw ConfigError("invalid weekend soc range");
    if (weekend_stay_min_h <= 0 || weekend_stay_max_h < weekend_stay_min_h) throw ConfigError("invalid weekend stay");
    if (step_seconds <= 0) throw ConfigError("step must be positive");
    if (max_arrival_offset_s < 0 || max_departure_offset_s < 0 || daily_jitter_s < 0)
        throw ConfigError("time offsets must be non-negative");
}

std::vector<DriverProfile> random_driver_profiles(const SessionGenConfig& config) {
    config.validate();
    Rng rng(config.seed);
    std::vector<DriverProfile> out;
    for (std::size_t i = 0; i < config.profiles; ++i) {
        DriverProfile p;
        p.id = static_cast<int>(i);
        p.commute_km = std::round(rng.uniform(config.min_commute_km, config.max_commute_km));
        p.arrival_offset_s = static_cast<std::int64_t>(rng.uniform() * static_cast<double>(config.max_arrival_offset_s));
        p.departure_offset_s =
            static_cast<std::int64_t>(rng.uniform() * static_cast<double>(config.max_departure_offset_s));
        p.vehicle = random_vehicle(rng);
        out.push_back(p);
    }
    out.front().arrival_offset_s = 0;
    out.back().departure_offset_s = 0;
    return out;
}

std::vector<Session> generate_sessions(std::span<const DriverProfile> profiles, Date first_day, Date last_day,
                                       const WorkingHours& hours, const HolidaySet& holidays,
                                       const SessionGenConfig& config) {
    config.validate();
    if (last_day < first_day) throw ConfigError("session span must cover at least one day");
    if (hours.fall_second_of_day <= hours.rise_second_of_day) throw ConfigError("working hours must rise before they fall");
    Rng rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
    const std::int64_t step = config.step_seconds;
    std::vector<Session> out;
    for (std::int64_t dn = first_day.day_number(); dn <= last_day.day_number(); ++dn) {
        const Date day = Date::from_day_number(dn);
        const Timestamp midnight = Timestamp::from_date(day);
        if (day.weekday() <= 5 && !holidays.contains(day)) {
            for (std::size_t k = 0; k < profiles.size(); ++k) {
                const auto& p = profiles[k];
                const auto jitter_a = static_cast<std::int64_t>(rng.uniform() * static_cast<double>(config.daily_jitter_s));
                const auto jitter_d = static_cast<std::int64_t>(rng.uniform() * static_cast<double>(config.daily_jitter_s));
                Timestamp arrival = midnight + hours.rise_second_of_day;
                if (k != 0) arrival = snap(arrival + p.arrival_offset_s + jitter_a, step);
                Timestamp departure = midnight + hours.fall_second_of_day;
                if (k + 1 != profiles.size()) departure = snap(departure - p.departure_offset_s - jitter_d, step);
                if (departure <= arrival) continue;
                const double used = 2.0 * p.commute_km * config.consumption_kwh_per_100km / 100.0;
                const double soc = std::clamp(1.0 - used / p.vehicle.battery_kwh, 0.05, 1.0);
                out.push_back(Session{0, p.id, p.vehicle, arrival, departure, soc});
            }
            continue;
        }
        for (std::size_t v = 0; v < config.weekend_visitors; ++v) {
            for (int hour = config.weekend_first_hour; hour < config.weekend_last_hour; ++hour) {
                if (!rng.bernoulli(config.weekend_probability)) continue;
                const Timestamp arrival =
                    snap(midnight + hour * kSecondsPerHour + static_cast<std::int64_t>(rng.uniform() * 3600.0), step);
                const double stay = rng.uniform(config.weekend_stay_min_h, config.weekend_stay_max_h);
                const Timestamp departure =
                    std::max(arrival + step, snap(arrival + static_cast<std::int64_t>(stay * 3600.0), step));
                const Vehicle vehicle = random_vehicle(rng);
                const double soc = rng.uniform(config.weekend_soc_min, config.weekend_soc_max);
                out.push_back(Session{0, -1, vehicle, arrival, departure, soc});
            }
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const Session& a, const Session& b) { return a.arrival < b.arrival; });
    for (std::size_t i = 0; i < out.size(); ++i) out[i].id = static_cast<int>(i);
    return out;
}

std::vector<double> water_fill(double capacity, std::span<const double> weights, std::span<const double> caps) {
    if (weights.size() != caps.size()) throw ShapeError("water_fill: weights and caps differ in length");
    std::vector<double> alloc(weights.size(), 0.0);
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < weights.size(); ++i)
        if (weights[i] > 0.0 && caps[i] > 0.0) active.push_back(i);
    double remaining = std::max(0.0, capacity);
    while (remaining > 0.0 && !active.empty()) {
        double total = 0.0;
        for (auto i : active) total += weights[i];
        std::vector<std::size_t> keep;
        bool capped = false;
        for (auto i : active) {
            if (remaining * weights[i] / total >= caps[i]) {
                alloc[i] = caps[i];
                capped = true;
            } else {
                keep.push_back(i);
            }
        }
        if (!capped) {
            for (auto i : active) alloc[i] = remaining * weights[i] / total;
            break;
        }
        for (auto i : active)
            if (alloc[i] == caps[i]) remaining -= caps[i];
        remaining = std::max(0.0, remaining);
        active = std::move(keep);
    }
    return alloc;
}

double uncontrolled_power(const Vehicle& vehicle, double soc, std::int64_t step_seconds) {
    const double missing_wh = std::max(0.0, 1.0 - soc) * vehicle.battery_kwh * 1000.0;
    return std::min(station_rate(vehicle), missing_wh * 3600.0 / static_cast<double>(step_seconds));
}

Schedule grid_oriented_schedule(std::span<const double> forecast_w, Timestamp start, std::int64_t step_seconds,
                                std::span<const ConnectedVehicle> vehicles, double limit_w) {
    if (forecast_w.empty()) throw DataError("grid-oriented schedule needs a non-empty forecast");
    Schedule plan{start, step_seconds, {}};
    std::vector<double> soc(vehicles.size());
    for (std::size_t i = 0; i < vehicles.size(); ++i) soc[i] = vehicles[i].soc;
    std::vector<double> weights(vehicles.size()), caps(vehicles.size());
    for (std::size_t k = 0; k < forecast_w.size(); ++k) {
        const Timestamp t = start + static_cast<std::int64_t>(k) * step_seconds;
        const double free = std::max(0.0, limit_w - forecast_w[k]);
        for (std::size_t i = 0; i < vehicles.size(); ++i) {
            const auto& v = vehicles[i];
            const bool present = t < v.departure;
            const double hours = static_cast<double>(std::max<std::int64_t>(0, t - v.connected_since)) / 3600.0;
            weights[i] = present ? (1.0 - soc[i]) * (1.0 + hours) : 0.0;
            caps[i] = present ? uncontrolled_power(v.vehicle, soc[i], step_seconds) : 0.0;
        }
        auto power = water_fill(free, weights, caps);
        const double planned = std::accumulate(power.begin(), power.end(), 0.0);
        if (planned > free + 1e-6)
            throw Error(fmt::format("charging plan of {} W exceeds the free capacity {} W", planned, free));
        for (std::size_t i = 0; i < vehicles.size(); ++i)
            soc[i] = std::min(1.0, soc[i] + power[i] * static_cast<double>(step_seconds) / 3600.0 /
                                                 (vehicles[i].vehicle.battery_kwh * 1000.0));
        plan.power.push_back(std::move(power));
    }
    return plan;
}

std::string to_string(Strategy s) { return s == Strategy::Uncontrolled ? "uncontrolled" : "controlled"; }

Strategy parse_strategy(const std::string& text) {
    if (text == "uncontrolled") return Strategy::Uncontrolled;
    if (text == "controlled" || text == "grid-oriented") return Strategy::GridOriented;
    throw ConfigError(fmt::format("unknown charging strategy '{}'", text));
}

ScenarioResult simulate(const Scenario& scenario, std::span<const Session> sessions, const LoadSeries& building,
                        const ForecastProvider& forecasts, Timestamp from, Timestamp to) {
    if (scenario.stations < 1) throw ConfigError("a scenario needs at least one station");
    if (!(scenario.limit_w > 0.0)) throw ConfigError("grid limit must be positive");
    if (from >= to || !building.covers(from) || !building.covers(to - building.step_seconds))
        throw DataError(fmt::format("building load does not cover [{}, {})", from.iso(), to.iso()));
    const std::int64_t step = building.step_seconds;
    const double dt_h = static_cast<double>(step) / 3600.0;

    ScenarioResult result;
    result.scenario = scenario;
    result.charging_w.start = from;
    result.charging_w.step_seconds = step;

    std::vector<std::size_t> order(sessions.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return sessions[a].arrival < sessions[b].arrival; });
    for (auto i : order) {
        SessionOutcome o;
        o.session = sessions[i];
        o.soc_out = o.session.soc_in;
        result.sessions.push_back(o);
    }

    std::vector<std::optional<std::size_t>> station(scenario.stations);
    std::deque<std::size_t> waiting;
    std::size_t next = 0;
    double overload_sum = 0.0;
    std::vector<std::size_t> connected;
    std::vector<ConnectedVehicle> planner_input;
    for (Timestamp t = from; t < to; t += step) {
        for (auto& s : station)
            if (s && result.sessions[*s].session.departure <= t) s.reset();
        while (next < result.sessions.size() && result.sessions[next].session.arrival <= t) waiting.push_back(next++);
        std::erase_if(waiting, [&](std::size_t i) { return result.sessions[i].session.departure <= t; });
        for (std::size_t k = 0; k < station.size() && !waiting.empty(); ++k) {
            if (station[k]) continue;
            auto& o = result.sessions[waiting.front()];
            o.station = static_cast<int>(k);
            o.connected = t;
            station[k] = waiting.front();
            waiting.pop_front();
        }

        connected.clear();
        for (const auto& s : station)
            if (s) connected.push_back(*s);
        std::vector<double> power(connected.size(), 0.0);
        std::optional<std::vector<double>> forecast;
        if (scenario.strategy == Strategy::GridOriented && !connected.empty()) {
            forecast = forecasts ? forecasts(t) : std::nullopt;
            if (!forecast || forecast->empty()) ++result.unplanned_steps;
        }
        if (forecast && !forecast->empty()) {
            planner_input.clear();
            for (auto i : connected) {
                const auto& o = result.sessions[i];
                planner_input.push_back(ConnectedVehicle{o.session.vehicle, o.soc_out, *o.connected, o.session.departure});
            }
            const Schedule plan = grid_oriented_schedule(std::span<const double>(forecast->data(), 1), t, step,
                                                         planner_input, scenario.limit_w);
            power = plan.power.front();
        } else {
            for (std::size_t k = 0; k < connected.size(); ++k) {
                const auto& o = result.sessions[connected[k]];
                power[k] = uncontrolled_power(o.session.vehicle, o.soc_out, step);
            }
        }

        double charging = 0.0;
        for (std::size_t k = 0; k < connected.size(); ++k) {
            auto& o = result.sessions[connected[k]];
            const double kwh = power[k] * dt_h / 1000.0;
            o.delivered_kwh += kwh;
            o.soc_out = std::min(1.0, o.soc_out + kwh / o.session.vehicle.battery_kwh);
            if (power[k] > 0.0) o.charging_seconds += step;
            charging += power[k];
        }
        result.charging_w.values.push_back(charging);
        const double excess = building.at(t) + charging - scenario.limit_w;
        if (excess > kOverloadToleranceW) {
            ++result.stats.registered_overloads;
            result.stats.max_overload_w = std::max(result.stats.max_overload_w, excess);
            overload_sum += excess;
        }
    }

    auto& st = result.stats;
    if (st.registered_overloads > 0) st.mean_overload_w = overload_sum / static_cast<double>(st.registered_overloads);
    double energy = 0.0, seconds = 0.0;
    for (const auto& o : result.sessions) {
        if (!o.connected) continue;
        ++st.sessions_charged;
        energy += o.delivered_kwh;
        seconds += static_cast<double>(o.charging_seconds);
    }
    if (st.sessions_charged > 0) {
        st.avg_energy_kwh = energy / static_cast<double>(st.sessions_charged);
        st.avg_charging_seconds = seconds / static_cast<double>(st.sessions_charged);
    }
    return result;
}

double derive_grid_limit(const LoadSeries& building) {
    if (building.empty()) throw DataError("cannot derive a grid limit from an empty load history");
    const double raw = building.max() / 0.8;
    return std::ceil(raw / 10000.0 - 1e-9) * 10000.0;
}

} // namespace loadcast
