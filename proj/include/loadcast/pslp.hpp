#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "loadcast/calendar.hpp"
#include "loadcast/load_series.hpp"

namespace loadcast {

inline constexpr std::size_t kPslpSlots = 288;
inline constexpr std::int64_t kPslpStepSeconds = kSecondsPerDay / kPslpSlots;

/// Running per-slot sums and counts for one (season, day class) pair.
struct PslpBucket {
    std::array<double, kPslpSlots> sum{};
    std::array<std::uint64_t, kPslpSlots> count{};

    bool empty() const;
};

/// Personalized profile state: mean daily curves learned from the building's own load.
struct PslpState {
    std::array<std::array<PslpBucket, kDayClassCount>, kSeasonCount> buckets{};
    std::optional<Timestamp> last_refit;

    const PslpBucket& bucket(Season s, DayClass c) const {
        return buckets[static_cast<std::size_t>(s)][static_cast<std::size_t>(c)];
    }
    PslpBucket& bucket(Season s, DayClass c) {
        return buckets[static_cast<std::size_t>(s)][static_cast<std::size_t>(c)];
    }
    /// sum / count for the slot; NaN when no measurement has been folded in.
    double profile_value(Season s, DayClass c, std::size_t slot) const;
    bool empty() const;
};

/// Folds every measurement with timestamp in [state.last_refit, clock) into the running
/// means and moves last_refit to `clock`. Measurements at or after `clock` are ignored and
/// belong to a later refit. Requires a 5-minute grid.
PslpState pslp_refit(PslpState state, const LoadSeries& measurements, Timestamp clock,
                     const HolidaySet& holidays);

/// True when `now` is a scheduled refit instant (every day at `refit_second_of_day`).
bool pslp_refit_due(Timestamp now, std::int64_t refit_second_of_day = 12 * kSecondsPerHour);

/// Season tried after `s` when its bucket is empty: Winter -> Transition -> Summer,
/// Transition -> Winter -> Summer, Summer -> Transition -> Winter.
std::array<Season, kSeasonCount> season_fallback_chain(Season s);

struct PslpForecast {
    LoadSeries series;
    std::vector<std::uint8_t> fallback;  ///< 1 where the requested (season, class) slot was empty
    std::size_t fallback_steps = 0;
};

/// Applies the learned profiles over the horizon. Empty slots fall back first along the
/// season chain, then to the other day classes in Weekday, Saturday, Sunday order, then to
/// the mean over every observed value for that slot. Throws ColdStartError on an empty state.
PslpForecast pslp_forecast(const PslpState& state, Timestamp start, std::size_t steps,
                           const HolidaySet& holidays, std::int64_t step_seconds = kPslpStepSeconds);

} // namespace loadcast
