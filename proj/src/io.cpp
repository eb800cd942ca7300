#include "loadcast/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>

#include <fmt/format.h>

#include "loadcast/errors.hpp"

namespace loadcast {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::optional<double> parse_value(std::string_view text) {
    text = trim(text);
    if (text.empty() || text == "nan" || text == "NaN" || text == "NA") return std::numeric_limits<double>::quiet_NaN();
    double v = 0.0;
    const char* begin = text.data();
    if (*begin == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
    return v;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(fmt::format("cannot open '{}'", path.string()));
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError(fmt::format("cannot write '{}'", path.string()));
    return out;
}

} // namespace

std::vector<Reading> read_readings_csv(std::istream& in, std::string_view value_column, const std::string& source) {
    std::string line;
    std::size_t line_no = 0;
    const std::string expected = fmt::format("timestamp,{}", value_column);
    bool header = false;
    std::vector<Reading> out;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view row = trim(line);
        if (row.empty()) continue;
        if (!header) {
            std::string h(row);
            h.erase(std::remove(h.begin(), h.end(), ' '), h.end());
            if (h.rfind("\xEF\xBB\xBF", 0) == 0) h.erase(0, 3);
            if (h != expected)
                throw DataError(fmt::format("{}:{}: expected header '{}', got '{}'", source, line_no, expected, row));
            header = true;
            continue;
        }
        const auto comma = row.find(',');
        if (comma == std::string_view::npos || row.find(',', comma + 1) != std::string_view::npos)
            throw DataError(fmt::format("{}:{}: expected two comma-separated fields", source, line_no));
        Reading r;
        try {
            r.time = Timestamp::parse(trim(row.substr(0, comma)));
        } catch (const DataError& e) {
            throw DataError(fmt::format("{}:{}: {}", source, line_no, e.what()));
        }
        const auto v = parse_value(row.substr(comma + 1));
        if (!v) throw DataError(fmt::format("{}:{}: malformed number '{}'", source, line_no, trim(row.substr(comma + 1))));
        r.value = *v;
        out.push_back(r);
    }
    if (!header) throw DataError(fmt::format("{}: empty file", source));
    return out;
}

std::vector<Reading> read_readings_csv(const std::filesystem::path& path, std::string_view value_column) {
    auto in = open_input(path);
    return read_readings_csv(in, value_column, path.string());
}

void write_series_csv(std::ostream& out, const LoadSeries& series, std::string_view value_column) {
    out << "timestamp," << value_column << '\n';
    for (std::size_t i = 0; i < series.size(); ++i) out << fmt::format("{},{}\n", series.time_at(i).iso(), series.values[i]);
}

void write_series_csv(const std::filesystem::path& path, const LoadSeries& series, std::string_view value_column) {
    auto out = open_output(path);
    write_series_csv(out, series, value_column);
}

HolidaySet read_holidays(std::istream& in, const std::string& source) {
    HolidaySet out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto row = trim(line);
        if (row.empty() || row.front() == '#') continue;
        try {
            out.insert(Date::parse(row));
        } catch (const DataError& e) {
            throw DataError(fmt::format("{}:{}: {}", source, line_no, e.what()));
        }
    }
    return out;
}

HolidaySet read_holidays(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_holidays(in, path.string());
}

void write_holidays(std::ostream& out, const HolidaySet& holidays) {
    for (const auto& d : holidays.dates()) out << d.iso() << '\n';
}

std::int64_t infer_step(std::vector<Timestamp> times) {
    std::sort(times.begin(), times.end());
    std::map<std::int64_t, std::size_t> counts;
    for (std::size_t i = 1; i < times.size(); ++i) {
        const auto d = times[i] - times[i - 1];
        if (d > 0) ++counts[d];
    }
    if (counts.empty()) throw DataError("cannot infer a sampling step from fewer than two distinct timestamps");
    return std::max_element(counts.begin(), counts.end(), [](const auto& a, const auto& b) {
               return a.second < b.second;
           })->first;
}

QualityReport quality_report(const GapReport& gaps, std::int64_t native_step) {
    QualityReport q;
    q.native_step_seconds = native_step;
    q.raw_readings = gaps.raw_readings;
    q.slots = gaps.slots;
    q.missing_slots = gaps.missing_slots;
    q.duplicates = gaps.duplicates;
    q.invalid = gaps.invalid;
    q.longest_gap = gaps.longest_gap;
    q.reordered = gaps.reordered;
    if (gaps.slots) q.missing_pct = 100.0 * static_cast<double>(gaps.missing_slots) / static_cast<double>(gaps.slots);
    if (gaps.raw_readings) {
        q.double_pct = 100.0 * static_cast<double>(gaps.duplicates) / static_cast<double>(gaps.raw_readings);
        q.incorrect_pct = 100.0 * static_cast<double>(gaps.invalid) / static_cast<double>(gaps.raw_readings);
    }
    return q;
}

IngestedSeries ingest_readings(std::span<const Reading> raw, std::int64_t target_step, bool allow_negative) {
    if (raw.empty()) throw DataError("no readings");
    std::vector<Timestamp> times;
    times.reserve(raw.size());
    for (const auto& r : raw) times.push_back(r.time);
    const std::int64_t native = infer_step(times);
    const auto earliest = std::min_element(times.begin(), times.end())->epoch_seconds();
    if (native <= target_step && target_step % native == 0 && floor_mod(earliest, native) == 0) {
        auto reg = regularize(raw, native, allow_negative);
        IngestedSeries out{std::move(reg.series), quality_report(reg.gaps, native)};
        if (native == target_step && out.series.start.epoch_seconds() % target_step == 0) return out;
        // Drop leading samples until the series starts on a whole target step.
        const Timestamp aligned(floor_div(out.series.start.epoch_seconds() + target_step - 1, target_step) * target_step);
        LoadSeries trimmed = out.series.slice(aligned, out.series.end());
        if (trimmed.size() < static_cast<std::size_t>(target_step / native))
            throw DataError("readings span less than one target step after alignment");
        out.series = resample(trimmed, target_step);
        return out;
    }
    auto reg = regularize(raw, native, allow_negative);
    if (reg.series.size() < 2) throw DataError("a coarse series needs at least two samples");
    const Timestamp first(floor_div(reg.series.start.epoch_seconds() + target_step - 1, target_step) * target_step);
    const Timestamp last = reg.series.time_at(reg.series.size() - 1);
    LoadSeries fine;
    fine.start = first;
    fine.step_seconds = target_step;
    for (Timestamp t = first; t <= last; t += target_step) fine.values.push_back(reg.series.interpolate(t));
    return IngestedSeries{std::move(fine), quality_report(reg.gaps, native)};
}

IngestResult ingest(const std::filesystem::path& load_csv, const std::filesystem::path& temperature_csv,
                    const std::optional<std::filesystem::path>& holidays_file, std::int64_t step_seconds) {
    IngestResult out;
    auto load = ingest_readings(read_readings_csv(load_csv, "power_w"), step_seconds, false);
    const auto temp_raw = read_readings_csv(temperature_csv, "temp_c");
    std::vector<Timestamp> times;
    for (const auto& r : temp_raw) times.push_back(r.time);
    if (temp_raw.empty()) throw DataError(fmt::format("{}: no temperature readings", temperature_csv.string()));
    const std::int64_t temp_step = infer_step(times);
    auto temp = regularize(temp_raw, temp_step, true);
    const Timestamp last_load = load.series.time_at(load.series.size() - 1);
    const Timestamp last_temp = temp.series.time_at(temp.series.size() - 1);
    if (temp.series.start > load.series.start || last_temp < last_load)
        throw DataError(fmt::format("temperature covers [{}, {}] but the load spans [{}, {}]",
                                    temp.series.start.iso(), last_temp.iso(), load.series.start.iso(), last_load.iso()));
    out.data.load = std::move(load.series);
    out.load_quality = load.quality;
    out.data.temperature = std::move(temp.series);
    out.temperature_quality = quality_report(temp.gaps, temp_step);
    if (holidays_file) out.data.holidays = read_holidays(*holidays_file);
    return out;
}

} // namespace loadcast
