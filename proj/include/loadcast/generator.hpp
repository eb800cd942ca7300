#pragma once

#include <cstdint>

#include "loadcast/calendar.hpp"
#include "loadcast/load_series.hpp"

namespace loadcast {

/// Commercial building with a weekday working-hours plateau over a night base load.
/// Defaults follow a mid-sized office building: mean 19.89 kW, peak 84.74 kW, base 3.5 kW.
struct SyntheticBuildingSpec {
    double mean_kw = 19.89;
    double max_kw = 84.74;
    double base_kw = 3.5;
    std::int64_t rise_start_s = 6 * kSecondsPerHour;  ///< ramp from base to plateau
    std::int64_t rise_end_s = 8 * kSecondsPerHour;
    std::int64_t fall_start_s = 17 * kSecondsPerHour;  ///< ramp back down to base
    std::int64_t fall_end_s = 18 * kSecondsPerHour;
    double weekend_fraction = 0.1;  ///< weekend/holiday daytime load relative to the weekday plateau, above base
    double noise = 0.05;            ///< relative standard deviation of the per-step noise
    double peaks_per_day = 0.5;     ///< mean number of short load peaks per working day
    bool peak_at_max = true;        ///< place one step exactly at max_kw
    Timestamp start = Timestamp::from_civil(2019, 1, 1);
    int days = 60;
    std::int64_t step_seconds = 300;
    std::uint64_t seed = 42;

    /// Throws ConfigError unless 0 < base < mean < max and the day shape is well ordered.
    void validate() const;
};

/// Series in watts. The plateau height is solved so the series mean equals mean_kw before
/// clipping at max_kw; noise and peaks are seeded, so equal specs give equal series.
LoadSeries gen_building_load(const SyntheticBuildingSpec& spec, const HolidaySet& holidays = {});

/// Median of the values between 00:00 and 04:00, the building's night base load.
double base_load(const LoadSeries& load);

struct SyntheticWeatherSpec {
    double annual_mean_c = 10.0;
    double seasonal_amplitude_c = 9.0;  ///< warmest around mid-July
    double daily_amplitude_c = 4.0;     ///< warmest around 15:00
    double noise_c = 1.0;               ///< AR(1) deviation scale
    Timestamp start = Timestamp::from_civil(2019, 1, 1);
    int days = 60;
    std::int64_t step_seconds = 3600;
    std::uint64_t seed = 42;
};

LoadSeries gen_temperature(const SyntheticWeatherSpec& spec);

} // namespace loadcast
