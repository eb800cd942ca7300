#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "loadcast/calendar.hpp"
#include "loadcast/load_series.hpp"

namespace loadcast {

inline constexpr std::size_t kQuarterHoursPerDay = 96;
inline constexpr double kSlpReferenceKwh = 1000.0;
inline constexpr int kSlpReferenceYear = 2019;

/// Nine quarter-hour day curves (3 seasons x 3 day classes) in watts for a customer
/// with an annual consumption of 1000 kWh.
struct SlpProfileSet {
    std::string label = "G1";
    std::array<std::array<std::array<double, kQuarterHoursPerDay>, kDayClassCount>, kSeasonCount> values{};

    double value(Season s, DayClass c, std::size_t quarter_hour) const {
        return values[static_cast<std::size_t>(s)][static_cast<std::size_t>(c)][quarter_hour];
    }
    double& value(Season s, DayClass c, std::size_t quarter_hour) {
        return values[static_cast<std::size_t>(s)][static_cast<std::size_t>(c)][quarter_hour];
    }

    /// Energy in kWh obtained by applying the curves to every day of `year`.
    double annual_energy_kwh(int year, const HolidaySet& holidays = {}) const;
};

/// Commercial working-day shape (plateau 08-18 h on weekdays, short Saturday morning,
/// flat Sunday) scaled to exactly 1000 kWh over the reference year without holidays.
const SlpProfileSet& bundled_g1_profile();

/// Reads `season,day_class,slot_index,power_w_per_1000kwh` rows (9 x 96). Throws DataError
/// on malformed or incomplete tables and when the reference-year energy is off by > 0.5 %.
SlpProfileSet read_slp_csv(std::istream& in, std::string label = "custom");
SlpProfileSet read_slp_csv(const std::filesystem::path& path);
void write_slp_csv(std::ostream& out, const SlpProfileSet& profiles);

/// Forecast on a `step_seconds` grid (default 5 min). Each step holds the value of the
/// quarter hour containing it, scaled by annual_kwh / 1000.
LoadSeries slp_forecast(const SlpProfileSet& profiles, double annual_kwh, Timestamp start,
                        std::size_t steps, const HolidaySet& holidays, std::int64_t step_seconds = 300);

/// Mean observed power extrapolated to a full year (8760 h), in kWh.
double estimate_annual_kwh(const LoadSeries& load);

} // namespace loadcast
