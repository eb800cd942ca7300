#include "loadcast/engine.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include <fmt/format.h>

#include "loadcast/errors.hpp"

namespace loadcast {

void EngineConfig::validate() const {
    if (step_seconds <= 0 || kSecondsPerDay % step_seconds != 0)
        throw ConfigError(fmt::format("step must divide a day, got {} s", step_seconds));
    if (horizon_steps < 2) throw ConfigError("horizon must cover at least two steps");
    if (horizon_seconds() > kSecondsPerDay)
        throw ConfigError(fmt::format("horizon of {} s exceeds 24 h; the daily lag feature would be unknown",
                                      horizon_seconds()));
    if (window_days < 1 || window_seconds() < kSecondsPerWeek + horizon_seconds())
        throw ConfigError(fmt::format("window of {} days is shorter than 7 days plus the horizon", window_days));
    if (nn_refit_seconds <= 0 || nn_refit_seconds % step_seconds != 0)
        throw ConfigError(fmt::format("nn refit cadence {} s is not a multiple of the step", nn_refit_seconds));
    if (pslp_refit_second_of_day < 0 || pslp_refit_second_of_day >= kSecondsPerDay ||
        pslp_refit_second_of_day % step_seconds != 0)
        throw ConfigError(fmt::format("pslp refit time {} s is not a step inside the day", pslp_refit_second_of_day));
    if (lead_in_days < 0) throw ConfigError("lead-in must be non-negative");
    if (max_steps && *max_steps == 0) throw ConfigError("max_steps must be positive when given");
}

Readiness cold_start_policy(ForecasterKind kind, Timestamp history_start, Timestamp now) {
    std::int64_t needed = 0;
    switch (kind) {
    case ForecasterKind::Slp: needed = 0; break;
    case ForecasterKind::Pslp: needed = kSecondsPerDay; break;
    case ForecasterKind::Neural:
    case ForecasterKind::Reference: needed = kSecondsPerWeek; break;
    }
    const Timestamp first = history_start + needed;
    return Readiness{now >= first, first};
}

std::string to_string(AbstainReason reason) {
    switch (reason) {
    case AbstainReason::NotReady: return "not-ready";
    case AbstainReason::NotFitted: return "not-fitted";
    case AbstainReason::Failed: return "failed";
    }
    return "unknown";
}

const std::vector<double>* ForecastTrack::forecast_at(Timestamp t) const {
    if (forecasts.size() != reports.size()) return nullptr;
    const auto it = std::lower_bound(reports.begin(), reports.end(), t,
                                     [](const ErrorReport& r, Timestamp v) { return r.issued_at < v; });
    if (it == reports.end() || it->issued_at != t) return nullptr;
    return &forecasts[static_cast<std::size_t>(it - reports.begin())];
}

const ForecastTrack* SimulationRun::track(const std::string& name) const {
    for (const auto& t : tracks)
        if (t.name == name) return &t;
    return nullptr;
}

namespace {

void annotate(std::vector<Annotation>& out, std::vector<std::ptrdiff_t>& open, std::size_t slot,
              const std::string& name, AbstainReason reason, Timestamp t, std::int64_t step, std::string message) {
    if (open[slot] >= 0) {
        auto& a = out[static_cast<std::size_t>(open[slot])];
        if (a.reason == reason && a.last + step == t && (reason != AbstainReason::Failed || a.message == message)) {
            a.last = t;
            ++a.steps;
            return;
        }
    }
    open[slot] = static_cast<std::ptrdiff_t>(out.size());
    out.push_back(Annotation{name, reason, t, t, 1, std::move(message)});
}

FeatureMatrix features_for(const Dataset& data) {
    const Timestamp from = data.load.start + kSecondsPerWeek;
    if (from >= data.load.end()) {
        FeatureMatrix empty;
        empty.start = from;
        empty.step_seconds = data.load.step_seconds;
        empty.x.resize(0, kFeatureCount);
        return empty;
    }
    return build_features(data.load, data.temperature, data.holidays, from, data.load.end());
}

} // namespace

SimulationRun run(const Dataset& data, const EngineConfig& config,
                  std::span<const std::unique_ptr<Forecaster>> roster, const IssueHook& hook) {
    config.validate();
    const auto& load = data.load;
    if (load.step_seconds != config.step_seconds)
        throw DataError(fmt::format("load step {} s does not match the engine step {} s", load.step_seconds,
                                    config.step_seconds));
    const Timestamp first = load.start + static_cast<std::int64_t>(config.lead_in_days) * kSecondsPerDay;
    if (first + config.horizon_seconds() > load.end())
        throw DataError(fmt::format("load ends at {}; the {}-day lead-in plus one horizon needs data until {}",
                                    load.end().iso(), config.lead_in_days,
                                    (first + config.horizon_seconds()).iso()));
    std::size_t steps = static_cast<std::size_t>((load.end() - first - config.horizon_seconds()) / config.step_seconds) + 1;
    if (config.max_steps) steps = std::min(steps, *config.max_steps);

    const FeatureMatrix features = features_for(data);

    SimulationRun result;
    result.config = config;
    result.first_step = first;
    result.steps = steps;
    for (const auto& f : roster) result.tracks.push_back(ForecastTrack{f->name(), f->kind(), {}, {}, 0});
    std::vector<std::ptrdiff_t> open(roster.size(), -1);

    const std::size_t h = config.horizon_steps;
    for (std::size_t s = 0; s < steps; ++s) {
        const Timestamp now = first + static_cast<std::int64_t>(s) * config.step_seconds;
        const StepView view(data, features, now, config.window_seconds(), h);
        const std::size_t at = *load.index_of(now);
        const std::span<const double> actual(load.values.data() + at, h);
        std::span<const double> naive;
        if (now - kSecondsPerWeek >= load.start)
            naive = std::span<const double>(load.values.data() + at - static_cast<std::size_t>(kSecondsPerWeek / config.step_seconds), h);

        for (std::size_t k = 0; k < roster.size(); ++k) {
            Forecaster& f = *roster[k];
            ForecastTrack& track = result.tracks[k];
            const auto abstain = [&](AbstainReason reason, std::string message) {
                ++track.abstained;
                annotate(result.annotations, open, k, track.name, reason, now, config.step_seconds, std::move(message));
            };
            const Readiness ready = cold_start_policy(f.kind(), load.start, now);
            if (!ready.ready && !config.force_forecast) {
                abstain(AbstainReason::NotReady, fmt::format("history sufficient from {}", ready.first_feasible.iso()));
                continue;
            }
            std::vector<double> forecast;
            try {
                f.update(view, result.refits);
                if (!f.fitted() && !config.force_forecast) {
                    abstain(AbstainReason::NotFitted, "no fit yet");
                    continue;
                }
                forecast = f.forecast(view, h);
                if (forecast.size() != h)
                    throw ShapeError(fmt::format("forecast has {} values, expected {}", forecast.size(), h));
                if (!std::all_of(forecast.begin(), forecast.end(), [](double v) { return std::isfinite(v); }))
                    throw DataError("forecast contains non-finite values");
            } catch (const ColdStartError& e) {
                abstain(AbstainReason::NotReady, e.what());
                continue;
            } catch (const Error& e) {
                abstain(AbstainReason::Failed, e.what());
                continue;
            }
            track.reports.push_back(evaluate(now, forecast, actual, naive, config.mape_mode));
            if (hook) hook(track.name, now, forecast);
            if (config.keep_forecasts) track.forecasts.push_back(std::move(forecast));
        }
    }
    return result;
}

std::string to_string(AdaptationPhase phase) {
    switch (phase) {
    case AdaptationPhase::Before: return "before";
    case AdaptationPhase::Spike: return "spike";
    case AdaptationPhase::Adaptation: return "adaptation";
    case AdaptationPhase::Adapted: return "adapted";
    }
    return "unknown";
}

std::vector<EventTrajectory> adaptation_report(const SimulationRun& run, const std::string& forecaster,
                                               std::span<const Date> events, const AdaptationConfig& config) {
    const ForecastTrack* track = run.track(forecaster);
    if (!track) throw ConfigError(fmt::format("no forecaster named '{}' in the run", forecaster));
    if (config.pre_days < 1 || config.post_days < 1 || !(config.spike_factor > 0) || !(config.return_factor > 0))
        throw ConfigError("adaptation windows and factors must be positive");
    const auto& reports = track->reports;
    std::vector<EventTrajectory> out;
    for (const Date& event : events) {
        const Timestamp t0 = Timestamp::from_date(event);
        const Timestamp from = t0 - config.pre_days * kSecondsPerDay;
        const Timestamp to = t0 + config.post_days * kSecondsPerDay;
        if (reports.empty() || from < reports.front().issued_at || t0 > reports.back().issued_at)
            throw DataError(fmt::format("event {} lies outside the span of issued forecasts of {}", event.iso(),
                                        forecaster));
        EventTrajectory tr;
        tr.event = event;
        double pre_sum = 0.0;
        std::size_t pre_n = 0;
        for (const auto& r : reports) {
            if (r.issued_at < from || r.issued_at >= to) continue;
            tr.issued_at.push_back(r.issued_at);
            tr.mae.push_back(r.mae_w);
            if (r.issued_at < t0) {
                pre_sum += r.mae_w;
                ++pre_n;
            }
        }
        tr.pre_event_mae = pre_n ? pre_sum / static_cast<double>(pre_n) : 0.0;
        const double spike_level = config.spike_factor * tr.pre_event_mae;
        const double return_level = config.return_factor * tr.pre_event_mae;

        bool in_spike = false;
        bool spike_done = false;
        std::deque<std::pair<Timestamp, double>> day;
        double day_sum = 0.0;
        for (std::size_t i = 0; i < tr.mae.size(); ++i) {
            const Timestamp t = tr.issued_at[i];
            if (t < t0) {
                tr.phase.push_back(AdaptationPhase::Before);
                continue;
            }
            day.emplace_back(t, tr.mae[i]);
            day_sum += tr.mae[i];
            while (day.front().first <= t - kSecondsPerDay) {
                day_sum -= day.front().second;
                day.pop_front();
            }
            const double rolling = day_sum / static_cast<double>(day.size());
            if (!spike_done && tr.mae[i] > spike_level) {
                in_spike = true;
                tr.spike = true;
            } else if (in_spike) {
                in_spike = false;
                spike_done = true;
            }
            if (in_spike) {
                tr.phase.push_back(AdaptationPhase::Spike);
            } else if (tr.adapted_at || rolling <= return_level) {
                if (!tr.adapted_at) tr.adapted_at = t;
                tr.phase.push_back(AdaptationPhase::Adapted);
            } else {
                tr.phase.push_back(AdaptationPhase::Adaptation);
            }
        }
        out.push_back(std::move(tr));
    }
    return out;
}

} // namespace loadcast
