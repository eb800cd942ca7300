#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "loadcast/network.hpp"
#include "loadcast/scaler.hpp"
#include "loadcast/training.hpp"

namespace loadcast {

/// A network together with everything needed to reuse it: the cached input/target scalers,
/// the optimizer moments for warm refits and the history of the most recent fit.
struct TrainedModel {
    Network network;
    ScalerParams x_scaler;
    ScalerParams y_scaler;
    AdamState adam;
    std::uint64_t seed = 0;
    int fits = 0;
    FitResult last_fit;

    explicit TrainedModel(const NetworkConfig& config) : network(config) {}
};

/// JSON snapshot ("loadcast-model", version 1). Doubles are written in shortest round-trip
/// form, so load(save(m)) reproduces every parameter bit for bit.
void save_model(std::ostream& out, const TrainedModel& model);
void save_model(const std::filesystem::path& path, const TrainedModel& model);
TrainedModel load_model(std::istream& in);
TrainedModel load_model(const std::filesystem::path& path);

} // namespace loadcast
