#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "loadcast/forecaster.hpp"
#include "loadcast/load_series.hpp"

namespace loadcast {

/// Reads a two-column `timestamp,<value_column>` CSV. Rows are returned in file order.
/// Throws DataError naming `source` and the 1-based line for malformed rows or headers.
/// Empty values and "nan" parse as NaN so they count as missing rather than malformed.
std::vector<Reading> read_readings_csv(std::istream& in, std::string_view value_column, const std::string& source);
std::vector<Reading> read_readings_csv(const std::filesystem::path& path, std::string_view value_column);

void write_series_csv(std::ostream& out, const LoadSeries& series, std::string_view value_column);
void write_series_csv(const std::filesystem::path& path, const LoadSeries& series, std::string_view value_column);

/// One ISO date per line; blank lines and lines starting with '#' are skipped.
HolidaySet read_holidays(std::istream& in, const std::string& source);
HolidaySet read_holidays(const std::filesystem::path& path);
void write_holidays(std::ostream& out, const HolidaySet& holidays);

/// Data-quality figures in the style of a measurement overview table.
struct QualityReport {
    std::int64_t native_step_seconds = 0;
    std::size_t raw_readings = 0;
    std::size_t slots = 0;
    std::size_t missing_slots = 0;
    std::size_t duplicates = 0;
    std::size_t invalid = 0;
    std::size_t longest_gap = 0;
    bool reordered = false;
    double missing_pct = 0.0;    ///< missing slots / slots on the native grid
    double double_pct = 0.0;     ///< duplicate readings / readings
    double incorrect_pct = 0.0;  ///< non-finite or out-of-range readings / readings
};

/// Most frequent positive spacing between consecutive distinct timestamps.
std::int64_t infer_step(std::vector<Timestamp> times);

QualityReport quality_report(const GapReport& gaps, std::int64_t native_step);

struct IngestedSeries {
    LoadSeries series;
    QualityReport quality;
};

/// Regularizes readings on their native grid and, when the native step divides
/// `target_step`, averages them onto a `target_step` grid aligned to whole multiples of
/// `target_step`. Coarser inputs are put on the target grid by interpolation.
IngestedSeries ingest_readings(std::span<const Reading> raw, std::int64_t target_step, bool allow_negative);

struct IngestResult {
    Dataset data;
    QualityReport load_quality;
    QualityReport temperature_quality;
};

/// Load and temperature CSVs plus an optional holiday file. The temperature series keeps its
/// native step and must cover the whole load span.
IngestResult ingest(const std::filesystem::path& load_csv, const std::filesystem::path& temperature_csv,
                    const std::optional<std::filesystem::path>& holidays_file, std::int64_t step_seconds = 300);

} // namespace loadcast
