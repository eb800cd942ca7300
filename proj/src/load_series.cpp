#include "loadcast/load_series.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "loadcast/errors.hpp"

namespace loadcast {

std::optional<std::size_t> LoadSeries::index_of(Timestamp t) const {
    if (!covers(t)) return std::nullopt;
    const auto offset = t - start;
    if (offset % step_seconds != 0) return std::nullopt;
    return static_cast<std::size_t>(offset / step_seconds);
}

double LoadSeries::at(Timestamp t) const {
    auto idx = index_of(t);
    if (!idx) throw DataError(fmt::format("no sample at {} (series {} .. {}, step {} s)", t.iso(),
                                          start.iso(), end().iso(), step_seconds));
    return values[*idx];
}

double LoadSeries::interpolate(Timestamp t) const {
    if (values.empty() || t < start || t > time_at(values.size() - 1))
        throw DataError(fmt::format("{} outside series span {} .. {}", t.iso(), start.iso(),
                                    values.empty() ? start.iso() : time_at(values.size() - 1).iso()));
    const auto offset = t - start;
    const auto i = static_cast<std::size_t>(offset / step_seconds);
    const auto rem = offset % step_seconds;
    if (rem == 0) return values[i];
    const double frac = static_cast<double>(rem) / static_cast<double>(step_seconds);
    return values[i] + frac * (values[i + 1] - values[i]);
}

LoadSeries LoadSeries::slice(Timestamp from, Timestamp to) const {
    LoadSeries out{from, step_seconds, {}};
    if (values.empty() || to <= from) {
        out.start = std::max(from, start);
        return out;
    }
    auto first = from <= start ? std::int64_t{0} : (from - start + step_seconds - 1) / step_seconds;
    auto last = to <= start ? std::int64_t{0} : (to - start + step_seconds - 1) / step_seconds;
    last = std::min<std::int64_t>(last, static_cast<std::int64_t>(values.size()));
    first = std::min(first, last);
    out.start = time_at(static_cast<std::size_t>(first));
    out.values.assign(values.begin() + first, values.begin() + last);
    return out;
}

double LoadSeries::mean() const {
    if (values.empty()) return 0.0;
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double LoadSeries::max() const {
    if (values.empty()) return 0.0;
    return *std::max_element(values.begin(), values.end());
}

RegularizeResult regularize(std::span<const Reading> raw, std::int64_t step_seconds, bool allow_negative) {
    if (step_seconds <= 0) throw ConfigError("regularize: step must be positive");
    if (raw.empty()) throw DataError("regularize: empty input");

    RegularizeResult result;
    GapReport& report = result.gaps;
    report.raw_readings = raw.size();
    report.reordered = !std::is_sorted(raw.begin(), raw.end(),
                                       [](const Reading& a, const Reading& b) { return a.time < b.time; });

    std::vector<Reading> sorted(raw.begin(), raw.end());
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const Reading& a, const Reading& b) { return a.time < b.time; });

    auto is_valid = [allow_negative](double v) { return std::isfinite(v) && (allow_negative || v >= 0.0); };
    report.invalid = static_cast<std::size_t>(
        std::count_if(raw.begin(), raw.end(), [&](const Reading& r) { return !is_valid(r.value); }));

    // Collapse equal timestamps, last one (in input order) wins.
    std::vector<Reading> unique;
    unique.reserve(sorted.size());
    for (const auto& r : sorted) {
        if (!unique.empty() && unique.back().time == r.time) {
            unique.back() = r;
            ++report.duplicates;
        } else {
            unique.push_back(r);
        }
    }

    std::vector<Reading> valid;
    valid.reserve(unique.size());
    std::copy_if(unique.begin(), unique.end(), std::back_inserter(valid),
                 [&](const Reading& r) { return is_valid(r.value); });
    if (valid.empty()) throw DataError("regularize: every reading is missing or invalid");

    const Timestamp first = unique.front().time;
    const Timestamp last = unique.back().time;
    const auto slots = static_cast<std::size_t>((last - first) / step_seconds + 1);
    report.slots = slots;

    LoadSeries& series = result.series;
    series.start = first;
    series.step_seconds = step_seconds;
    series.values.resize(slots);

    const std::int64_t half = step_seconds / 2;
    std::size_t next = 0;  // first valid reading with time >= current grid instant
    std::size_t window = 0;  // first valid reading with time >= current slot window start
    std::size_t run = 0;
    for (std::size_t i = 0; i < slots; ++i) {
        const Timestamp g = series.time_at(i);
        while (next < valid.size() && valid[next].time < g) ++next;
        if (next < valid.size() && valid[next].time == g) {
            series.values[i] = valid[next].value;
        } else if (next == 0) {
            series.values[i] = valid.front().value;
        } else if (next == valid.size()) {
            series.values[i] = valid.back().value;
        } else {
            const Reading& a = valid[next - 1];
            const Reading& b = valid[next];
            const double frac = static_cast<double>(g - a.time) / static_cast<double>(b.time - a.time);
            series.values[i] = a.value + frac * (b.value - a.value);
        }

        const Timestamp lo = g - half;
        const Timestamp hi = lo + step_seconds;
        while (window < valid.size() && valid[window].time < lo) ++window;
        const bool observed = window < valid.size() && valid[window].time < hi;
        if (observed) {
            run = 0;
        } else {
            ++report.missing_slots;
            report.longest_gap = std::max(report.longest_gap, ++run);
        }
    }
    return result;
}

LoadSeries resample(const LoadSeries& series, std::int64_t new_step_seconds) {
    if (new_step_seconds <= 0 || series.step_seconds <= 0 || new_step_seconds % series.step_seconds != 0)
        throw ConfigError(fmt::format("resample: {} s is not an integer multiple of {} s", new_step_seconds,
                                      series.step_seconds));
    const auto ratio = static_cast<std::size_t>(new_step_seconds / series.step_seconds);
    LoadSeries out{series.start, new_step_seconds, {}};
    const std::size_t blocks = series.size() / ratio;
    out.values.reserve(blocks);
    for (std::size_t b = 0; b < blocks; ++b) {
        auto first = series.values.begin() + static_cast<std::ptrdiff_t>(b * ratio);
        out.values.push_back(std::accumulate(first, first + static_cast<std::ptrdiff_t>(ratio), 0.0) /
                             static_cast<double>(ratio));
    }
    return out;
}

} // namespace loadcast
