#include "loadcast/pslp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "loadcast/errors.hpp"

namespace loadcast {

bool PslpBucket::empty() const {
    return std::all_of(count.begin(), count.end(), [](std::uint64_t c) { return c == 0; });
}

double PslpState::profile_value(Season s, DayClass c, std::size_t slot) const {
    const auto& b = bucket(s, c);
    if (b.count[slot] == 0) return std::nan("");
    return b.sum[slot] / static_cast<double>(b.count[slot]);
}

bool PslpState::empty() const {
    for (const auto& season : buckets)
        for (const auto& b : season)
            if (!b.empty()) return false;
    return true;
}

PslpState pslp_refit(PslpState state, const LoadSeries& measurements, Timestamp clock,
                     const HolidaySet& holidays) {
    if (!measurements.empty() && measurements.step_seconds != kPslpStepSeconds)
        throw ConfigError(fmt::format("pslp_refit: measurements must be on a {} s grid", kPslpStepSeconds));
    const Timestamp from = state.last_refit.value_or(Timestamp(std::numeric_limits<std::int64_t>::min()));
    std::int64_t cached_day = std::numeric_limits<std::int64_t>::min();
    DayType type{};
    for (std::size_t i = 0; i < measurements.size(); ++i) {
        const Timestamp t = measurements.time_at(i);
        if (t < from || t >= clock) continue;
        if (t.day_number() != cached_day) {
            cached_day = t.day_number();
            type = classify_day(t.date(), holidays);
        }
        const auto slot = static_cast<std::size_t>(t.second_of_day() / kPslpStepSeconds);
        auto& b = state.bucket(type.season, type.day_class);
        b.sum[slot] += measurements.values[i];
        b.count[slot] += 1;
    }
    if (!state.last_refit || clock > *state.last_refit) state.last_refit = clock;
    return state;
}

bool pslp_refit_due(Timestamp now, std::int64_t refit_second_of_day) {
    return now.second_of_day() == refit_second_of_day;
}

std::array<Season, kSeasonCount> season_fallback_chain(Season s) {
    switch (s) {
    case Season::Winter: return {Season::Winter, Season::Transition, Season::Summer};
    case Season::Transition: return {Season::Transition, Season::Winter, Season::Summer};
    case Season::Summer: return {Season::Summer, Season::Transition, Season::Winter};
    }
    return {s, s, s};
}

namespace {

// Returns the profile value for (season, class, slot) following the fallback order, and
// whether a fallback was needed.
std::pair<double, bool> resolve(const PslpState& state, Season season, DayClass cls, std::size_t slot) {
    for (Season s : season_fallback_chain(season)) {
        const double v = state.profile_value(s, cls, slot);
        if (!std::isnan(v)) return {v, s != season};
    }
    for (DayClass c : {DayClass::Weekday, DayClass::Saturday, DayClass::Sunday}) {
        if (c == cls) continue;
        for (Season s : season_fallback_chain(season)) {
            const double v = state.profile_value(s, c, slot);
            if (!std::isnan(v)) return {v, true};
        }
    }
    double sum = 0.0;
    std::uint64_t count = 0;
    for (const auto& by_class : state.buckets)
        for (const auto& b : by_class) {
            sum += b.sum[slot];
            count += b.count[slot];
        }
    if (count > 0) return {sum / static_cast<double>(count), true};
    // Slot never observed anywhere: mean over every observed slot.
    for (const auto& by_class : state.buckets)
        for (const auto& b : by_class)
            for (std::size_t k = 0; k < kPslpSlots; ++k) {
                sum += b.sum[k];
                count += b.count[k];
            }
    return {sum / static_cast<double>(count), true};
}

} // namespace

PslpForecast pslp_forecast(const PslpState& state, Timestamp start, std::size_t steps,
                           const HolidaySet& holidays, std::int64_t step_seconds) {
    if (state.empty()) throw ColdStartError("pslp_forecast: no observed day yet", start + kSecondsPerDay);
    if (step_seconds <= 0) throw ConfigError("pslp_forecast: step must be positive");
    PslpForecast out;
    out.series = LoadSeries{start, step_seconds, std::vector<double>(steps)};
    out.fallback.assign(steps, 0);
    std::int64_t cached_day = std::numeric_limits<std::int64_t>::min();
    DayType type{};
    for (std::size_t i = 0; i < steps; ++i) {
        const Timestamp t = out.series.time_at(i);
        if (t.day_number() != cached_day) {
            cached_day = t.day_number();
            type = classify_day(t.date(), holidays);
        }
        const auto slot = static_cast<std::size_t>(t.second_of_day() / kPslpStepSeconds);
        auto [v, fell_back] = resolve(state, type.season, type.day_class, slot);
        out.series.values[i] = v;
        if (fell_back) {
            out.fallback[i] = 1;
            ++out.fallback_steps;
        }
    }
    return out;
}

} // namespace loadcast
