#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace loadcast {

inline constexpr std::int64_t kSecondsPerHour = 3600;
inline constexpr std::int64_t kSecondsPerDay = 86400;
inline constexpr std::int64_t kSecondsPerWeek = 7 * kSecondsPerDay;

/// Calendar date without time of day.
struct Date {
    int year = 1970;
    unsigned month = 1;
    unsigned day = 1;

    auto operator<=>(const Date&) const = default;

    static Date from_day_number(std::int64_t days_since_epoch);
    /// Accepts YYYY-MM-DD. Throws DataError on malformed input or impossible dates.
    static Date parse(std::string_view text);

    std::int64_t day_number() const;
    /// ISO weekday, Monday = 1 .. Sunday = 7.
    int weekday() const;
    bool valid() const;
    std::string iso() const;
};

/// Timezone-naive local time in whole seconds since 1970-01-01 00:00. Every day has 86400 s.
class Timestamp {
public:
    constexpr Timestamp() = default;
    constexpr explicit Timestamp(std::int64_t epoch_seconds) : seconds_(epoch_seconds) {}

    static Timestamp from_date(const Date& date, std::int64_t second_of_day = 0);
    static Timestamp from_civil(int year, unsigned month, unsigned day, int hour = 0, int minute = 0,
                                int second = 0);
    /// Accepts "YYYY-MM-DD", "YYYY-MM-DDTHH:MM[:SS]" or the same with a space separator.
    static Timestamp parse(std::string_view text);

    constexpr std::int64_t epoch_seconds() const { return seconds_; }

    Date date() const;
    int year() const { return date().year; }
    unsigned month() const { return date().month; }
    unsigned day() const { return date().day; }
    /// Monday = 1 .. Sunday = 7.
    int weekday() const;
    std::int64_t second_of_day() const;
    /// Seconds since the most recent Monday 00:00.
    std::int64_t second_of_week() const;
    std::int64_t day_number() const;

    std::string iso() const;

    constexpr Timestamp operator+(std::int64_t s) const { return Timestamp(seconds_ + s); }
    constexpr Timestamp operator-(std::int64_t s) const { return Timestamp(seconds_ - s); }
    constexpr std::int64_t operator-(Timestamp other) const { return seconds_ - other.seconds_; }
    constexpr Timestamp& operator+=(std::int64_t s) {
        seconds_ += s;
        return *this;
    }
    constexpr auto operator<=>(const Timestamp&) const = default;

private:
    std::int64_t seconds_ = 0;
};

/// Floor division and modulo that stay correct for negative numerators.
constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

constexpr std::int64_t floor_mod(std::int64_t a, std::int64_t b) { return a - floor_div(a, b) * b; }

} // namespace loadcast
