#include "loadcast/slp.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "loadcast/errors.hpp"

namespace loadcast {

namespace {

double ramp(double h, double from_h, double to_h, double from_v, double to_v) {
    return from_v + (to_v - from_v) * (h - from_h) / (to_h - from_h);
}

double weekday_shape(double h) {
    constexpr double night = 0.30;
    if (h < 6.0) return night;
    if (h < 8.0) return ramp(h, 6.0, 8.0, night, 1.0);
    if (h < 12.0) return 1.0;
    if (h < 13.0) return 0.92;
    if (h < 16.0) return 1.0;
    if (h < 18.0) return 0.95;
    if (h < 20.0) return ramp(h, 18.0, 20.0, 0.95, night);
    return night;
}

double saturday_shape(double h) {
    constexpr double night = 0.30;
    if (h < 7.0) return night;
    if (h < 8.0) return ramp(h, 7.0, 8.0, night, 0.55);
    if (h < 13.0) return 0.55;
    if (h < 14.0) return ramp(h, 13.0, 14.0, 0.55, night);
    return night;
}

double sunday_shape(double) { return 0.28; }

SlpProfileSet make_bundled_g1() {
    SlpProfileSet p;
    p.label = "G1";
    constexpr std::array<double, kSeasonCount> season_factor{0.90, 1.00, 1.12};  // summer, transition, winter
    for (std::size_t s = 0; s < kSeasonCount; ++s) {
        for (std::size_t q = 0; q < kQuarterHoursPerDay; ++q) {
            const double h = (static_cast<double>(q) + 0.5) / 4.0;
            p.values[s][0][q] = season_factor[s] * weekday_shape(h);
            p.values[s][1][q] = season_factor[s] * saturday_shape(h);
            p.values[s][2][q] = season_factor[s] * sunday_shape(h);
        }
    }
    const double scale = kSlpReferenceKwh / p.annual_energy_kwh(kSlpReferenceYear);
    for (auto& season : p.values)
        for (auto& curve : season)
            for (auto& v : curve) v *= scale;
    return p;
}

void validate_reference_energy(const SlpProfileSet& p) {
    const double e = p.annual_energy_kwh(kSlpReferenceYear);
    if (std::abs(e - kSlpReferenceKwh) > 0.005 * kSlpReferenceKwh)
        throw DataError(fmt::format("profile set '{}' integrates to {:.3f} kWh over {}, expected 1000 kWh +- 0.5 %",
                                    p.label, e, kSlpReferenceYear));
}

} // namespace

double SlpProfileSet::annual_energy_kwh(int year, const HolidaySet& holidays) const {
    const auto first = Date{year, 1, 1}.day_number();
    const auto last = Date{year, 12, 31}.day_number();
    double wh = 0.0;
    for (auto d = first; d <= last; ++d) {
        const auto type = classify_day(Date::from_day_number(d), holidays);
        for (std::size_t q = 0; q < kQuarterHoursPerDay; ++q) wh += value(type.season, type.day_class, q) * 0.25;
    }
    return wh / 1000.0;
}

const SlpProfileSet& bundled_g1_profile() {
    static const SlpProfileSet profile = make_bundled_g1();
    return profile;
}

SlpProfileSet read_slp_csv(std::istream& in, std::string label) {
    SlpProfileSet p;
    p.label = std::move(label);
    std::array<std::array<std::array<bool, kQuarterHoursPerDay>, kDayClassCount>, kSeasonCount> seen{};
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw DataError("profile csv: empty input");
    ++line_no;
    if (line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "season,day_class,slot_index,power_w_per_1000kwh")
        throw DataError(fmt::format("profile csv: unexpected header '{}'", line));
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string season, cls, slot, power;
        if (!std::getline(ss, season, ',') || !std::getline(ss, cls, ',') || !std::getline(ss, slot, ',') ||
            !std::getline(ss, power))
            throw DataError(fmt::format("profile csv line {}: expected 4 fields", line_no));
        try {
            const auto s = static_cast<std::size_t>(parse_season(season));
            const auto c = static_cast<std::size_t>(parse_day_class(cls));
            std::size_t pos = 0;
            const auto q = std::stoul(slot, &pos);
            if (pos != slot.size() || q >= kQuarterHoursPerDay) throw DataError("bad slot index");
            const double v = std::stod(power, &pos);
            if (pos != power.size() || !std::isfinite(v) || v < 0) throw DataError("bad power value");
            if (seen[s][c][q]) throw DataError("duplicate row");
            seen[s][c][q] = true;
            p.values[s][c][q] = v;
            ++rows;
        } catch (const std::exception& e) {
            throw DataError(fmt::format("profile csv line {}: {}", line_no, e.what()));
        }
    }
    if (rows != kSeasonCount * kDayClassCount * kQuarterHoursPerDay)
        throw DataError(fmt::format("profile csv: expected 864 rows, got {}", rows));
    validate_reference_energy(p);
    return p;
}

SlpProfileSet read_slp_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError(fmt::format("cannot open profile file {}", path.string()));
    return read_slp_csv(in, path.stem().string());
}

void write_slp_csv(std::ostream& out, const SlpProfileSet& profiles) {
    out << "season,day_class,slot_index,power_w_per_1000kwh\n";
    for (auto s : {Season::Summer, Season::Transition, Season::Winter})
        for (auto c : {DayClass::Weekday, DayClass::Saturday, DayClass::Sunday})
            for (std::size_t q = 0; q < kQuarterHoursPerDay; ++q)
                out << fmt::format("{},{},{},{}\n", to_string(s), to_string(c), q, profiles.value(s, c, q));
}

LoadSeries slp_forecast(const SlpProfileSet& profiles, double annual_kwh, Timestamp start, std::size_t steps,
                        const HolidaySet& holidays, std::int64_t step_seconds) {
    if (!(annual_kwh > 0.0) || !std::isfinite(annual_kwh))
        throw ConfigError("slp_forecast: annual consumption must be positive");
    if (step_seconds <= 0) throw ConfigError("slp_forecast: step must be positive");
    if (start.year() < 1) throw DataError("slp_forecast: horizon before year 1");
    const double scale = annual_kwh / kSlpReferenceKwh;
    LoadSeries out{start, step_seconds, std::vector<double>(steps)};
    std::int64_t cached_day = std::numeric_limits<std::int64_t>::min();
    DayType type{};
    for (std::size_t i = 0; i < steps; ++i) {
        const Timestamp t = out.time_at(i);
        if (t.day_number() != cached_day) {
            cached_day = t.day_number();
            type = classify_day(t.date(), holidays);
        }
        const auto q = static_cast<std::size_t>(t.second_of_day() / 900);
        out.values[i] = profiles.value(type.season, type.day_class, q) * scale;
    }
    return out;
}

double estimate_annual_kwh(const LoadSeries& load) {
    if (load.empty()) throw DataError("estimate_annual_kwh: empty series");
    return load.mean() * 8760.0 / 1000.0;
}

} // namespace loadcast
