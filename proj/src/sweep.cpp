#include "loadcast/sweep.hpp"

#include <algorithm>
#include <ostream>

#include <fmt/format.h>

#include "loadcast/errors.hpp"

namespace loadcast {

void SweepGrid::validate() const {
    if (kinds.empty() || layers.empty() || neurons.empty()) throw ConfigError("sweep grid has an empty axis");
    for (int l : layers)
        if (l < kMinHiddenLayers || l > kMaxHiddenLayers)
            throw ConfigError(fmt::format("sweep layers must be in [1, 8], got {}", l));
    for (int n : neurons)
        if (std::find(kNeuronGrid.begin(), kNeuronGrid.end(), n) == kNeuronGrid.end())
            throw ConfigError(fmt::format("sweep neurons must be one of 8/16/32/64/128, got {}", n));
}

std::vector<SweepCell> architecture_sweep(const SweepGrid& grid, const Dataset& data, const EngineConfig& engine,
                                          const NeuralSettings& base) {
    grid.validate();
    std::vector<SweepCell> cells;
    for (NetworkKind kind : grid.kinds)
        for (int layers : grid.layers)
            for (int neurons : grid.neurons) {
                SweepCell cell{kind, layers, neurons, false, {}, {}, 0, 0.0};
                try {
                    NeuralSettings settings = base;
                    settings.network.kind = kind;
                    settings.network.hidden_layers = layers;
                    settings.network.neurons = neurons;
                    std::vector<std::unique_ptr<Forecaster>> roster;
                    roster.push_back(std::make_unique<NeuralForecaster>(settings));
                    const auto result = run(data, engine, roster);
                    const auto& track = result.tracks.front();
                    const auto& nn = static_cast<const NeuralForecaster&>(*roster.front());
                    if (track.reports.empty()) {
                        cell.failed = true;
                        cell.error = "no forecast issued";
                        for (const auto& a : result.annotations)
                            if (a.reason == AbstainReason::Failed) {
                                cell.error = a.message;
                                break;
                            }
                    } else {
                        cell.averages = aggregate(track.reports);
                    }
                    cell.fits = nn.model() ? static_cast<std::size_t>(nn.model()->fits) : 0;
                    if (cell.fits > 0) cell.mean_training_seconds = nn.training_seconds() / static_cast<double>(cell.fits);
                } catch (const Error& e) {
                    cell.failed = true;
                    cell.error = e.what();
                }
                cells.push_back(std::move(cell));
            }
    return cells;
}

namespace {

std::string opt(const std::optional<double>& v) { return v ? fmt::format("{}", *v) : std::string(); }

} // namespace

void write_sweep_csv(std::ostream& out, const std::vector<SweepCell>& cells, bool with_timing) {
    out << "kind,layers,neurons,status,mase,mae_w,rmse_w,mape_pct,issuances,fits";
    if (with_timing) out << ",mean_training_seconds";
    out << '\n';
    for (const auto& c : cells) {
        out << fmt::format("{},{},{},{},", to_string(c.kind), c.layers, c.neurons, c.failed ? "failed" : "ok");
        if (c.failed)
            out << fmt::format(",,,,0,{}", c.fits);
        else
            out << fmt::format("{},{},{},{},{},{}", opt(c.averages.mase), c.averages.mae_w, c.averages.rmse_w,
                               opt(c.averages.mape_pct), c.averages.count, c.fits);
        if (with_timing) out << fmt::format(",{:.3f}", c.mean_training_seconds);
        out << '\n';
    }
}

void write_sweep_table(std::ostream& out, const std::vector<SweepCell>& cells) {
    std::vector<NetworkKind> kinds;
    std::vector<int> layers, neurons;
    for (const auto& c : cells) {
        if (std::find(kinds.begin(), kinds.end(), c.kind) == kinds.end()) kinds.push_back(c.kind);
        if (std::find(layers.begin(), layers.end(), c.layers) == layers.end()) layers.push_back(c.layers);
        if (std::find(neurons.begin(), neurons.end(), c.neurons) == neurons.end()) neurons.push_back(c.neurons);
    }
    const auto find = [&](NetworkKind k, int l, int n) -> const SweepCell* {
        for (const auto& c : cells)
            if (c.kind == k && c.layers == l && c.neurons == n) return &c;
        return nullptr;
    };
    struct Metric {
        const char* title;
        std::string (*cell)(const SweepCell&);
    };
    const Metric metrics[] = {
        {"MASE", [](const SweepCell& c) { return c.averages.mase ? fmt::format("{:.2f}", *c.averages.mase) : "-"; }},
        {"MAE [W]", [](const SweepCell& c) { return fmt::format("{:.0f}", c.averages.mae_w); }},
        {"RMSE [W]", [](const SweepCell& c) { return fmt::format("{:.0f}", c.averages.rmse_w); }},
    };
    for (NetworkKind k : kinds)
        for (const auto& m : metrics) {
            out << fmt::format("{} {}\n{:>8}", to_string(k), m.title, "layers");
            for (int n : neurons) out << fmt::format("{:>10}", fmt::format("{}N", n));
            out << '\n';
            for (int l : layers) {
                out << fmt::format("{:>8}", l);
                for (int n : neurons) {
                    const SweepCell* c = find(k, l, n);
                    out << fmt::format("{:>10}", !c ? "" : c->failed ? "failed" : m.cell(*c));
                }
                out << '\n';
            }
            out << '\n';
        }
}

} // namespace loadcast
