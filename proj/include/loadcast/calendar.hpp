#pragma once

#include <set>
#include <string_view>

#include "loadcast/time.hpp"

namespace loadcast {

enum class Season { Summer = 0, Transition = 1, Winter = 2 };
enum class DayClass { Weekday = 0, Saturday = 1, Sunday = 2 };

inline constexpr std::size_t kSeasonCount = 3;
inline constexpr std::size_t kDayClassCount = 3;

std::string_view to_string(Season s);
std::string_view to_string(DayClass c);
Season parse_season(std::string_view text);
DayClass parse_day_class(std::string_view text);

class HolidaySet {
public:
    HolidaySet() = default;
    explicit HolidaySet(std::set<Date> dates) : dates_(std::move(dates)) {}

    bool contains(const Date& d) const { return dates_.contains(d); }
    void insert(const Date& d) { dates_.insert(d); }
    bool empty() const { return dates_.empty(); }
    std::size_t size() const { return dates_.size(); }
    const std::set<Date>& dates() const { return dates_; }

private:
    std::set<Date> dates_;
};

/// Summer 15/05-14/09, Transition 21/03-14/05 and 15/09-31/10, Winter 01/11-20/03.
Season season_of(const Date& d);

struct DayType {
    Season season;
    DayClass day_class;
    auto operator<=>(const DayType&) const = default;
};

/// Holidays count as Sundays. 25 December and 1 January count as Saturdays unless they
/// fall on a Sunday; that rule is date-based and applies whether or not the date is listed.
DayType classify_day(const Date& d, const HolidaySet& holidays);

/// Nationwide German public holidays for the given years (inclusive).
HolidaySet german_public_holidays(int first_year, int last_year);

} // namespace loadcast
