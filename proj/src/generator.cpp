#include "loadcast/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "loadcast/errors.hpp"
#include "loadcast/random.hpp"

namespace loadcast {

namespace {

double day_shape(const SyntheticBuildingSpec& s, std::int64_t sod) {
    if (sod < s.rise_start_s || sod >= s.fall_end_s) return 0.0;
    if (sod < s.rise_end_s)
        return static_cast<double>(sod - s.rise_start_s) / static_cast<double>(s.rise_end_s - s.rise_start_s);
    if (sod < s.fall_start_s) return 1.0;
    return static_cast<double>(s.fall_end_s - sod) / static_cast<double>(s.fall_end_s - s.fall_start_s);
}

} // namespace

void SyntheticBuildingSpec::validate() const {
    if (!(base_kw > 0.0 && base_kw < mean_kw && mean_kw < max_kw))
        throw ConfigError(fmt::format("building spec needs 0 < base < mean < max, got {} / {} / {} kW", base_kw, mean_kw,
                                      max_kw));
    if (!(0 <= rise_start_s && rise_start_s < rise_end_s && rise_end_s <= fall_start_s && fall_start_s < fall_end_s &&
          fall_end_s <= kSecondsPerDay))
        throw ConfigError("building working hours must satisfy rise start < rise end <= fall start < fall end");
    if (weekend_fraction < 0.0 || noise < 0.0 || peaks_per_day < 0.0)
        throw ConfigError("weekend fraction, noise and peak rate must be non-negative");
    if (days < 1) throw ConfigError("building span must cover at least one day");
    if (step_seconds <= 0 || kSecondsPerDay % step_seconds != 0) throw ConfigError("step must divide a day");
}

LoadSeries gen_building_load(const SyntheticBuildingSpec& spec, const HolidaySet& holidays) {
    spec.validate();
    Rng rng(spec.seed);
    const auto per_day = static_cast<std::size_t>(kSecondsPerDay / spec.step_seconds);
    const std::size_t n = per_day * static_cast<std::size_t>(spec.days);
    const double base_w = spec.base_kw * 1000.0;
    const double max_w = spec.max_kw * 1000.0;

    std::vector<double> night(n), active(n);
    std::vector<double> peak(n, 0.0);
    const double working_steps =
        static_cast<double>(spec.fall_start_s - spec.rise_end_s) / static_cast<double>(spec.step_seconds);
    const double peak_start_p = working_steps > 0 ? spec.peaks_per_day / working_steps : 0.0;
    std::size_t noon_candidate = n;
    for (std::size_t i = 0; i < n; ++i) {
        const Timestamp t = spec.start + static_cast<std::int64_t>(i) * spec.step_seconds;
        const Date d = t.date();
        const bool workday = d.weekday() <= 5 && !holidays.contains(d);
        const std::int64_t sod = t.second_of_day();
        const double shape = day_shape(spec, sod) * (workday ? 1.0 : spec.weekend_fraction);
        night[i] = std::max(0.0, base_w * (1.0 + spec.noise * rng.normal()));
        active[i] = std::max(0.0, shape * (1.0 + spec.noise * rng.normal()));
        const bool plateau = workday && sod >= spec.rise_end_s && sod < spec.fall_start_s;
        if (plateau && rng.bernoulli(peak_start_p)) {
            const auto len = static_cast<std::size_t>(3 + rng.below(10));
            const double height = rng.uniform(0.5, 1.5);
            for (std::size_t k = i; k < std::min(n, i + len); ++k) peak[k] = std::max(peak[k], height);
        }
        if (workday && sod == 12 * kSecondsPerHour && (noon_candidate == n || i <= n / 2)) noon_candidate = i;
    }
    // Peaks only apply on top of the plateau.
    for (std::size_t i = 0; i < n; ++i) active[i] += peak[i] * (active[i] > 0.0 ? 1.0 : 0.0);

    double night_sum = 0.0, active_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        night_sum += night[i];
        active_sum += active[i];
    }
    const double target = spec.mean_kw * 1000.0 * static_cast<double>(n);
    if (!(active_sum > 0.0) || target <= night_sum)
        throw ConfigError("building spec has no working-hours load to reach the requested mean");
    const double plateau_w = (target - night_sum) / active_sum;

    LoadSeries out;
    out.start = spec.start;
    out.step_seconds = spec.step_seconds;
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.values[i] = std::min(max_w, night[i] + plateau_w * active[i]);
    if (spec.peak_at_max && noon_candidate < n) out.values[noon_candidate] = max_w;
    return out;
}

double base_load(const LoadSeries& load) {
    std::vector<double> night;
    for (std::size_t i = 0; i < load.size(); ++i)
        if (load.time_at(i).second_of_day() < 4 * kSecondsPerHour) night.push_back(load.values[i]);
    if (night.empty()) throw DataError("no samples between 00:00 and 04:00");
    const auto mid = night.begin() + static_cast<std::ptrdiff_t>(night.size() / 2);
    std::nth_element(night.begin(), mid, night.end());
    if (night.size() % 2 == 1) return *mid;
    const double upper = *mid;
    const double lower = *std::max_element(night.begin(), mid);
    return 0.5 * (lower + upper);
}

LoadSeries gen_temperature(const SyntheticWeatherSpec& spec) {
    if (spec.days < 1 || spec.step_seconds <= 0) throw ConfigError("weather span and step must be positive");
    Rng rng(spec.seed ^ 0x5851f42d4c957f2dULL);
    LoadSeries out;
    out.start = spec.start;
    out.step_seconds = spec.step_seconds;
    const auto n = static_cast<std::size_t>(spec.days * kSecondsPerDay / spec.step_seconds) + 1;
    const double two_pi = 2.0 * std::numbers::pi;
    double ar = 0.0;
    const double phi = 0.95;
    for (std::size_t i = 0; i < n; ++i) {
        const Timestamp t = spec.start + static_cast<std::int64_t>(i) * spec.step_seconds;
        const Date d = t.date();
        const double doy = static_cast<double>(t.day_number() - Date{d.year, 1, 1}.day_number()) +
                           static_cast<double>(t.second_of_day()) / kSecondsPerDay;
        const double seasonal = -std::cos(two_pi * (doy - 15.0) / 365.25);
        const double hour = static_cast<double>(t.second_of_day()) / 3600.0;
        const double daily = std::cos(two_pi * (hour - 15.0) / 24.0);
        ar = phi * ar + std::sqrt(1.0 - phi * phi) * rng.normal();
        out.values.push_back(spec.annual_mean_c + spec.seasonal_amplitude_c * seasonal +
                             spec.daily_amplitude_c * daily + spec.noise_c * ar);
    }
    return out;
}

} // namespace loadcast
