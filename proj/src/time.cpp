#include "loadcast/time.hpp"

#include <charconv>

#include <fmt/format.h>

#include "loadcast/errors.hpp"

namespace loadcast {

namespace {

using std::chrono::days;
using std::chrono::sys_days;
using std::chrono::year_month_day;

template <typename T>
bool parse_int(std::string_view text, T& out) {
    if (text.empty()) return false;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc() && ptr == text.data() + text.size();
}

year_month_day to_ymd(const Date& d) {
    return std::chrono::year{d.year} / std::chrono::month{d.month} / std::chrono::day{d.day};
}

[[noreturn]] void bad_input(std::string_view what, std::string_view text) {
    throw DataError(fmt::format("malformed {}: '{}'", what, text));
}

} // namespace

Date Date::from_day_number(std::int64_t days_since_epoch) {
    year_month_day ymd{sys_days{days{days_since_epoch}}};
    return Date{static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day())};
}

Date Date::parse(std::string_view text) {
    // YYYY-MM-DD
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') bad_input("date", text);
    Date d;
    if (!parse_int(text.substr(0, 4), d.year) || !parse_int(text.substr(5, 2), d.month) ||
        !parse_int(text.substr(8, 2), d.day))
        bad_input("date", text);
    if (!d.valid()) bad_input("date", text);
    return d;
}

std::int64_t Date::day_number() const {
    return sys_days{to_ymd(*this)}.time_since_epoch().count();
}

int Date::weekday() const {
    std::chrono::weekday wd{sys_days{to_ymd(*this)}};
    return static_cast<int>(wd.iso_encoding());
}

bool Date::valid() const { return to_ymd(*this).ok(); }

std::string Date::iso() const { return fmt::format("{:04d}-{:02d}-{:02d}", year, month, day); }

Timestamp Timestamp::from_date(const Date& date, std::int64_t second_of_day) {
    return Timestamp(date.day_number() * kSecondsPerDay + second_of_day);
}

Timestamp Timestamp::from_civil(int y, unsigned m, unsigned d, int hour, int minute, int second) {
    return from_date(Date{y, m, d}, hour * kSecondsPerHour + minute * 60 + second);
}

Timestamp Timestamp::parse(std::string_view text) {
    auto trimmed = text;
    while (!trimmed.empty() && (trimmed.back() == 'Z' || trimmed.back() == ' ' || trimmed.back() == '\r'))
        trimmed.remove_suffix(1);
    if (trimmed.size() < 10) bad_input("timestamp", text);
    Date d = Date::parse(trimmed.substr(0, 10));
    if (trimmed.size() == 10) return from_date(d);
    if (trimmed[10] != 'T' && trimmed[10] != ' ') bad_input("timestamp", text);
    auto clock = trimmed.substr(11);
    int hh = 0, mm = 0, ss = 0;
    if (clock.size() != 5 && clock.size() != 8) bad_input("timestamp", text);
    if (clock[2] != ':' || !parse_int(clock.substr(0, 2), hh) || !parse_int(clock.substr(3, 2), mm))
        bad_input("timestamp", text);
    if (clock.size() == 8 && (clock[5] != ':' || !parse_int(clock.substr(6, 2), ss)))
        bad_input("timestamp", text);
    if (hh > 23 || mm > 59 || ss > 59 || hh < 0 || mm < 0 || ss < 0) bad_input("timestamp", text);
    return from_date(d, hh * kSecondsPerHour + mm * 60 + ss);
}

std::int64_t Timestamp::day_number() const { return floor_div(seconds_, kSecondsPerDay); }

Date Timestamp::date() const { return Date::from_day_number(day_number()); }

int Timestamp::weekday() const {
    // 1970-01-01 was a Thursday (ISO 4).
    return static_cast<int>(floor_mod(day_number() + 3, 7)) + 1;
}

std::int64_t Timestamp::second_of_day() const { return floor_mod(seconds_, kSecondsPerDay); }

std::int64_t Timestamp::second_of_week() const {
    return (weekday() - 1) * kSecondsPerDay + second_of_day();
}

std::string Timestamp::iso() const {
    const Date d = date();
    const auto sod = second_of_day();
    return fmt::format("{}T{:02d}:{:02d}:{:02d}", d.iso(), sod / 3600, (sod / 60) % 60, sod % 60);
}

} // namespace loadcast
