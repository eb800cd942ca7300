#pragma once

#include <stdexcept>
#include <string>

#include "loadcast/time.hpp"

namespace loadcast {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid configuration or violated call precondition (bad step ratio, bad grid bounds, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Input data that cannot be used: empty, unparseable, not covering the requested span.
class DataError : public Error {
public:
    using Error::Error;
};

// Not enough history yet. Carries the first timestamp at which the request becomes feasible.
class ColdStartError : public Error {
public:
    ColdStartError(const std::string& what, Timestamp first_feasible)
        : Error(what), first_feasible_(first_feasible) {}

    Timestamp first_feasible() const noexcept { return first_feasible_; }

private:
    Timestamp first_feasible_;
};

// A metric or statistic whose formula has a zero denominator on this input.
class UndefinedMetricError : public Error {
public:
    using Error::Error;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

class TrainingDivergedError : public Error {
public:
    TrainingDivergedError(const std::string& what, int epoch) : Error(what), epoch_(epoch) {}
    int epoch() const noexcept { return epoch_; }

private:
    int epoch_;
};

} // namespace loadcast
