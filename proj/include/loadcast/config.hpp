#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "loadcast/engine.hpp"
#include "loadcast/ev.hpp"
#include "loadcast/forecasters.hpp"
#include "loadcast/generator.hpp"
#include "loadcast/sweep.hpp"

namespace loadcast {

/// Where a command gets its data: CSV files, or the synthetic generators when no load file
/// is given.
struct DataSource {
    std::optional<std::string> load_csv;
    std::optional<std::string> temperature_csv;
    std::optional<std::string> holidays_file;
    bool german_holidays = true;  ///< generated data: use the nationwide German holidays
    SyntheticBuildingSpec building;
    SyntheticWeatherSpec weather;
};

struct EvStudyConfig {
    std::vector<std::size_t> stations{2, 5, 10};
    std::vector<Strategy> strategies{Strategy::Uncontrolled, Strategy::GridOriented};
    std::optional<double> limit_w;       ///< derived from the building load when absent
    std::string forecaster = "pslp";     ///< roster id used for planning, or "perfect"
    std::size_t seeds = 1;               ///< session sets generated with seed, seed+1, ...
    std::optional<std::uint64_t> seed;   ///< session generator seed; the run seed when absent
    std::optional<std::string> profiles_file;
    SessionGenConfig sessions;
};

/// Everything a command needs; echoed verbatim into each run manifest.
struct RunConfig {
    EngineConfig engine;
    std::vector<std::string> forecasters{"slp", "pslp", "ffnn:4x8"};
    TrainConfig train;
    int lookback = 12;
    std::size_t nn_min_samples = 288;
    std::optional<double> slp_annual_kwh;
    std::optional<std::string> slp_profile_file;
    bool export_full_forecasts = false;
    DataSource data;
    EvStudyConfig ev;
    SweepGrid sweep;
    std::uint64_t seed = 42;

    /// Propagates `seed` into the engine, training, generators and session generator.
    void apply_seed(std::uint64_t s);
    void validate() const;
};

/// Accepts a config object or a run manifest (whose "config" member is used). Unknown keys
/// are rejected so typos surface as ConfigError.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& config);

/// Roster entry: "slp", "pslp", "naive7d", "ffnn:<layers>x<neurons>" or "lstm:<layers>x<neurons>".
struct ForecasterSpec {
    std::string id;
    ForecasterKind kind = ForecasterKind::Slp;
    std::optional<NetworkConfig> network;
};

ForecasterSpec parse_forecaster_spec(const std::string& id, int lookback);
std::vector<std::unique_ptr<Forecaster>> make_roster(const RunConfig& config, const SlpProfileSet& slp_profiles);

} // namespace loadcast
