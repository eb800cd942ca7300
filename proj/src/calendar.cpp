#include "loadcast/calendar.hpp"

#include <fmt/format.h>

#include "loadcast/errors.hpp"

namespace loadcast {

std::string_view to_string(Season s) {
    switch (s) {
    case Season::Summer: return "summer";
    case Season::Transition: return "transition";
    case Season::Winter: return "winter";
    }
    return "?";
}

std::string_view to_string(DayClass c) {
    switch (c) {
    case DayClass::Weekday: return "weekday";
    case DayClass::Saturday: return "saturday";
    case DayClass::Sunday: return "sunday";
    }
    return "?";
}

Season parse_season(std::string_view text) {
    for (auto s : {Season::Summer, Season::Transition, Season::Winter})
        if (text == to_string(s)) return s;
    throw DataError(fmt::format("unknown season '{}'", text));
}

DayClass parse_day_class(std::string_view text) {
    for (auto c : {DayClass::Weekday, DayClass::Saturday, DayClass::Sunday})
        if (text == to_string(c)) return c;
    throw DataError(fmt::format("unknown day class '{}'", text));
}

Season season_of(const Date& d) {
    const unsigned md = d.month * 100 + d.day;
    if (md >= 515 && md <= 914) return Season::Summer;
    if ((md >= 321 && md <= 514) || (md >= 915 && md <= 1031)) return Season::Transition;
    return Season::Winter;
}

DayType classify_day(const Date& d, const HolidaySet& holidays) {
    const Season season = season_of(d);
    const int wd = d.weekday();
    const bool saturday_rule = (d.month == 12 && d.day == 25) || (d.month == 1 && d.day == 1);
    if (saturday_rule && wd != 7) return {season, DayClass::Saturday};
    if (holidays.contains(d) || wd == 7) return {season, DayClass::Sunday};
    if (wd == 6) return {season, DayClass::Saturday};
    return {season, DayClass::Weekday};
}

namespace {

// Anonymous Gregorian algorithm.
Date easter_sunday(int year) {
    const int a = year % 19;
    const int b = year / 100;
    const int c = year % 100;
    const int d = b / 4;
    const int e = b % 4;
    const int f = (b + 8) / 25;
    const int g = (b - f + 1) / 3;
    const int h = (19 * a + b - d - g + 15) % 30;
    const int i = c / 4;
    const int k = c % 4;
    const int l = (32 + 2 * e + 2 * i - h - k) % 7;
    const int m = (a + 11 * h + 22 * l) / 451;
    const int month = (h + l - 7 * m + 114) / 31;
    const int day = ((h + l - 7 * m + 114) % 31) + 1;
    return Date{year, static_cast<unsigned>(month), static_cast<unsigned>(day)};
}

} // namespace

HolidaySet german_public_holidays(int first_year, int last_year) {
    HolidaySet set;
    for (int y = first_year; y <= last_year; ++y) {
        for (auto [m, d] : {std::pair{1u, 1u}, {5u, 1u}, {10u, 3u}, {12u, 25u}, {12u, 26u}})
            set.insert(Date{y, m, d});
        const auto easter = easter_sunday(y).day_number();
        for (int offset : {-2, 1, 39, 50}) set.insert(Date::from_day_number(easter + offset));
    }
    return set;
}

} // namespace loadcast
