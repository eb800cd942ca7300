#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "loadcast/engine.hpp"
#include "loadcast/forecasters.hpp"

namespace loadcast {

struct SweepGrid {
    std::vector<NetworkKind> kinds{NetworkKind::Ffnn, NetworkKind::Lstm};
    std::vector<int> layers{1, 2, 3, 4, 5, 6, 7, 8};
    std::vector<int> neurons{8, 16, 32, 64, 128};

    /// Throws ConfigError for values outside 1-8 layers and 8/16/32/64/128 neurons.
    void validate() const;
};

struct SweepCell {
    NetworkKind kind = NetworkKind::Ffnn;
    int layers = 1;
    int neurons = 8;
    bool failed = false;
    std::string error;
    MetricAverages averages;
    std::size_t fits = 0;
    double mean_training_seconds = 0.0;
};

/// Runs the engine once per grid cell with a single neural forecaster built from `base`
/// (kind/layers/neurons replaced by the cell's) and averages its metrics. A cell that throws
/// or never issues a forecast is marked failed; the sweep continues.
std::vector<SweepCell> architecture_sweep(const SweepGrid& grid, const Dataset& data, const EngineConfig& engine,
                                          const NeuralSettings& base);

/// One row per cell: kind, layers, neurons, MASE, MAE, RMSE, MAPE, fits; training seconds
/// only when `with_timing` (timings differ between runs).
void write_sweep_csv(std::ostream& out, const std::vector<SweepCell>& cells, bool with_timing);
/// Layers x neurons tables of MASE, MAE and RMSE per network kind.
void write_sweep_table(std::ostream& out, const std::vector<SweepCell>& cells);

} // namespace loadcast
