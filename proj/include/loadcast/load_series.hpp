#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "loadcast/time.hpp"

namespace loadcast {

/// Uniformly spaced series: values[i] is the power (W) at start + i * step_seconds.
/// Also used for other uniformly sampled quantities such as temperature in degrees C.
struct LoadSeries {
    Timestamp start;
    std::int64_t step_seconds = 300;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    bool empty() const { return values.empty(); }
    Timestamp time_at(std::size_t i) const {
        return start + static_cast<std::int64_t>(i) * step_seconds;
    }
    /// One step past the last sample.
    Timestamp end() const { return time_at(values.size()); }
    bool covers(Timestamp t) const { return t >= start && t < end(); }

    /// Index of the sample exactly at `t`, if `t` lies on the grid inside the series.
    std::optional<std::size_t> index_of(Timestamp t) const;
    /// Value exactly at grid time `t`. Throws DataError when `t` is off-grid or out of range.
    double at(Timestamp t) const;
    /// Linear interpolation between neighbouring samples; exact on the grid.
    /// Throws DataError outside [start, time_at(size-1)].
    double interpolate(Timestamp t) const;
    /// Samples with timestamps in [from, to), clipped to the series.
    LoadSeries slice(Timestamp from, Timestamp to) const;

    double mean() const;
    double max() const;
};

struct Reading {
    Timestamp time;
    double value = 0.0;
};

/// Data-quality summary produced while regularizing raw readings.
struct GapReport {
    std::size_t raw_readings = 0;
    std::size_t slots = 0;
    std::size_t missing_slots = 0;  ///< grid slots without a valid reading nearby
    std::size_t longest_gap = 0;    ///< longest run of consecutive missing slots
    std::size_t duplicates = 0;     ///< readings dropped because a later one had the same timestamp
    std::size_t invalid = 0;        ///< non-finite or negative readings
    bool reordered = false;         ///< input was not sorted by time
};

struct RegularizeResult {
    LoadSeries series;
    GapReport gaps;
};

/// Puts irregular readings on a uniform grid anchored at the earliest timestamp.
///
/// Duplicate timestamps keep the last reading in input order. Non-finite or negative
/// readings count as missing. A grid instant with a reading takes that value; other
/// instants are linearly interpolated between the nearest valid readings on either side,
/// and leading/trailing instants take the nearest valid value. A slot counts as missing
/// when no valid reading falls within half a step of its instant. `allow_negative` keeps
/// negative readings valid, for quantities such as temperature.
RegularizeResult regularize(std::span<const Reading> raw, std::int64_t step_seconds, bool allow_negative = false);

/// Aggregates to a coarser step by averaging each block of new_step/step samples.
/// An incomplete trailing block is dropped. Throws ConfigError unless new_step is a
/// positive integer multiple of the series step.
LoadSeries resample(const LoadSeries& series, std::int64_t new_step_seconds);

} // namespace loadcast
