#include "loadcast/config.hpp"

#include <charconv>
#include <fstream>
#include <set>

#include <fmt/format.h>

#include "loadcast/errors.hpp"

namespace loadcast {

using nlohmann::json;

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed, std::string_view where) {
    if (!j.is_object()) throw ConfigError(fmt::format("{}: expected an object", where));
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : j.items())
        if (!ok.contains(key)) throw ConfigError(fmt::format("{}: unknown key '{}'", where, key));
}

template <typename T>
void read(const json& j, const char* key, T& out) {
    if (!j.contains(key) || j.at(key).is_null()) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(fmt::format("config key '{}' has the wrong type: {}", key, j.at(key).dump()));
    }
}

template <typename T>
void read(const json& j, const char* key, std::optional<T>& out) {
    if (!j.contains(key) || j.at(key).is_null()) return;
    T v{};
    read(j, key, v);
    out = v;
}

std::int64_t parse_clock(const std::string& text) {
    int h = -1, m = -1;
    if (text.size() == 5 && text[2] == ':') {
        std::from_chars(text.data(), text.data() + 2, h);
        std::from_chars(text.data() + 3, text.data() + 5, m);
    }
    if (h < 0 || h > 24 || m < 0 || m > 59 || (h == 24 && m != 0))
        throw ConfigError(fmt::format("expected a time of day HH:MM, got '{}'", text));
    return h * kSecondsPerHour + m * 60;
}

std::string format_clock(std::int64_t s) { return fmt::format("{:02d}:{:02d}", s / kSecondsPerHour, (s / 60) % 60); }

void read_clock(const json& j, const char* key, std::int64_t& out) {
    if (!j.contains(key) || j.at(key).is_null()) return;
    if (!j.at(key).is_string()) throw ConfigError(fmt::format("config key '{}' must be a HH:MM string", key));
    out = parse_clock(j.at(key).get<std::string>());
}

} // namespace

void RunConfig::apply_seed(std::uint64_t s) {
    seed = s;
    engine.seed = s;
    train.seed = s;
    data.building.seed = s;
    data.weather.seed = s;
    ev.sessions.seed = ev.seed.value_or(s);
}

void RunConfig::validate() const {
    engine.validate();
    train.validate();
    if (lookback < 1) throw ConfigError("lookback must be at least 1");
    if (nn_min_samples < 1) throw ConfigError("train.min_samples must be at least 1");
    if (slp_annual_kwh && !(*slp_annual_kwh > 0)) throw ConfigError("slp.annual_kwh must be positive");
    std::set<std::string> seen;
    for (const auto& id : forecasters) {
        parse_forecaster_spec(id, lookback);
        if (!seen.insert(id).second) throw ConfigError(fmt::format("forecaster '{}' listed twice", id));
    }
    if (data.temperature_csv && !data.load_csv) throw ConfigError("data.temperature given without data.load");
    if (data.load_csv && !data.temperature_csv) throw ConfigError("data.load needs data.temperature as well");
    if (!data.load_csv) data.building.validate();
    for (auto s : ev.stations)
        if (s < 1) throw ConfigError("ev.stations entries must be positive");
    if (ev.stations.empty() || ev.strategies.empty()) throw ConfigError("ev study needs stations and strategies");
    if (ev.limit_w && !(*ev.limit_w > 0)) throw ConfigError("ev.limit_w must be positive");
    if (ev.seeds < 1) throw ConfigError("ev.seeds must be at least 1");
    ev.sessions.validate();
    sweep.validate();
}

ForecasterSpec parse_forecaster_spec(const std::string& id, int lookback) {
    ForecasterSpec spec;
    spec.id = id;
    if (id == "slp") return spec;
    if (id == "pslp") {
        spec.kind = ForecasterKind::Pslp;
        return spec;
    }
    if (id == "naive7d") {
        spec.kind = ForecasterKind::Reference;
        return spec;
    }
    const auto colon = id.find(':');
    const auto x = id.find('x', colon == std::string::npos ? 0 : colon);
    if (colon == std::string::npos || x == std::string::npos)
        throw ConfigError(fmt::format("unknown forecaster '{}' (expected slp, pslp, naive7d, ffnn:LxN or lstm:LxN)", id));
    NetworkConfig net;
    net.kind = parse_network_kind(id.substr(0, colon));
    const auto parse_int = [&](std::string_view text, int& out) {
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
        if (ec != std::errc() || ptr != text.data() + text.size())
            throw ConfigError(fmt::format("malformed architecture in forecaster '{}'", id));
    };
    parse_int(std::string_view(id).substr(colon + 1, x - colon - 1), net.hidden_layers);
    parse_int(std::string_view(id).substr(x + 1), net.neurons);
    net.lookback = lookback;
    net.validate();
    spec.kind = ForecasterKind::Neural;
    spec.network = net;
    return spec;
}

std::vector<std::unique_ptr<Forecaster>> make_roster(const RunConfig& config, const SlpProfileSet& slp_profiles) {
    std::vector<std::unique_ptr<Forecaster>> roster;
    std::uint64_t nn_index = 0;
    for (const auto& id : config.forecasters) {
        const auto spec = parse_forecaster_spec(id, config.lookback);
        switch (spec.kind) {
        case ForecasterKind::Slp:
            roster.push_back(std::make_unique<SlpForecaster>(slp_profiles, config.slp_annual_kwh));
            break;
        case ForecasterKind::Pslp:
            roster.push_back(std::make_unique<PslpForecaster>(config.engine.pslp_refit_second_of_day));
            break;
        case ForecasterKind::Reference: roster.push_back(std::make_unique<PersistenceForecaster>()); break;
        case ForecasterKind::Neural: {
            NeuralSettings s;
            s.network = *spec.network;
            s.train = config.train;
            s.refit_seconds = config.engine.nn_refit_seconds;
            s.min_samples = config.nn_min_samples;
            s.seed = config.seed + 1000 * nn_index++;
            roster.push_back(std::make_unique<NeuralForecaster>(s));
            break;
        }
        }
    }
    return roster;
}

RunConfig parse_config(const json& input) {
    const json& j = input.contains("format") && input.at("format") == "loadcast-manifest" ? input.at("config") : input;
    check_keys(j,
               {"step_s", "horizon_steps", "window_days", "lead_in_days", "max_steps", "nn_refit", "pslp_refit",
                "forecasters", "seed", "mape_mode", "force_forecast", "export_full_forecasts", "train", "slp", "data",
                "ev", "sweep"},
               "config");
    RunConfig c;
    std::uint64_t seed = c.seed;
    read(j, "seed", seed);
    c.apply_seed(seed);

    auto& e = c.engine;
    read(j, "step_s", e.step_seconds);
    read(j, "horizon_steps", e.horizon_steps);
    read(j, "window_days", e.window_days);
    read(j, "lead_in_days", e.lead_in_days);
    read(j, "max_steps", e.max_steps);
    read(j, "force_forecast", e.force_forecast);
    read(j, "export_full_forecasts", c.export_full_forecasts);
    if (j.contains("nn_refit") && !j.at("nn_refit").is_null()) {
        const auto& v = j.at("nn_refit");
        if (v == "daily")
            e.nn_refit_seconds = kSecondsPerDay;
        else if (v == "step")
            e.nn_refit_seconds = e.step_seconds;
        else if (v.is_number_integer())
            e.nn_refit_seconds = v.get<std::int64_t>();
        else
            throw ConfigError(fmt::format("nn_refit must be \"daily\", \"step\" or seconds, got {}", v.dump()));
    }
    read_clock(j, "pslp_refit", e.pslp_refit_second_of_day);
    if (j.contains("mape_mode")) {
        const auto mode = j.at("mape_mode").get<std::string>();
        if (mode == "forecast")
            e.mape_mode = MapeMode::Forecast;
        else if (mode == "actual")
            e.mape_mode = MapeMode::Actual;
        else
            throw ConfigError(fmt::format("mape_mode must be \"forecast\" or \"actual\", got '{}'", mode));
    }
    read(j, "forecasters", c.forecasters);

    if (j.contains("train")) {
        const auto& t = j.at("train");
        check_keys(t,
                   {"max_epochs", "patience", "learning_rate", "beta1", "beta2", "epsilon", "batch_size", "min_delta",
                    "lookback", "min_samples"},
                   "train");
        read(t, "max_epochs", c.train.max_epochs);
        read(t, "patience", c.train.patience);
        read(t, "learning_rate", c.train.adam.learning_rate);
        read(t, "beta1", c.train.adam.beta1);
        read(t, "beta2", c.train.adam.beta2);
        read(t, "epsilon", c.train.adam.epsilon);
        read(t, "batch_size", c.train.batch_size);
        read(t, "min_delta", c.train.min_delta);
        read(t, "lookback", c.lookback);
        read(t, "min_samples", c.nn_min_samples);
    }
    if (j.contains("slp")) {
        const auto& s = j.at("slp");
        check_keys(s, {"annual_kwh", "profile_file"}, "slp");
        read(s, "annual_kwh", c.slp_annual_kwh);
        read(s, "profile_file", c.slp_profile_file);
    }
    if (j.contains("data")) {
        const auto& d = j.at("data");
        check_keys(d, {"load", "temperature", "holidays", "german_holidays", "generate"}, "data");
        read(d, "load", c.data.load_csv);
        read(d, "temperature", c.data.temperature_csv);
        read(d, "holidays", c.data.holidays_file);
        read(d, "german_holidays", c.data.german_holidays);
        if (d.contains("generate")) {
            const auto& g = d.at("generate");
            check_keys(g,
                       {"start", "days", "mean_kw", "max_kw", "base_kw", "weekend_fraction", "noise", "peaks_per_day",
                        "peak_at_max", "rise_start", "rise_end", "fall_start", "fall_end", "temperature_mean_c",
                        "temperature_noise_c"},
                       "data.generate");
            auto& b = c.data.building;
            if (g.contains("start")) {
                try {
                    b.start = Timestamp::from_date(Date::parse(g.at("start").get<std::string>()));
                } catch (const DataError& err) {
                    throw ConfigError(fmt::format("data.generate.start: {}", err.what()));
                }
            }
            read(g, "days", b.days);
            read(g, "mean_kw", b.mean_kw);
            read(g, "max_kw", b.max_kw);
            read(g, "base_kw", b.base_kw);
            read(g, "weekend_fraction", b.weekend_fraction);
            read(g, "noise", b.noise);
            read(g, "peaks_per_day", b.peaks_per_day);
            read(g, "peak_at_max", b.peak_at_max);
            read_clock(g, "rise_start", b.rise_start_s);
            read_clock(g, "rise_end", b.rise_end_s);
            read_clock(g, "fall_start", b.fall_start_s);
            read_clock(g, "fall_end", b.fall_end_s);
            read(g, "temperature_mean_c", c.data.weather.annual_mean_c);
            read(g, "temperature_noise_c", c.data.weather.noise_c);
        }
    }
    c.data.weather.start = c.data.building.start;
    c.data.weather.days = c.data.building.days;
    c.data.building.step_seconds = e.step_seconds;

    if (j.contains("ev")) {
        const auto& v = j.at("ev");
        check_keys(v,
                   {"stations", "strategy", "seed", "limit_w", "forecaster", "seeds", "profiles_file", "profiles",
                    "weekend_probability", "weekend_visitors", "consumption_kwh_per_100km", "min_commute_km",
                    "max_commute_km"},
                   "ev");
        if (v.contains("stations")) {
            if (v.at("stations").is_number_integer())
                c.ev.stations = {v.at("stations").get<std::size_t>()};
            else
                read(v, "stations", c.ev.stations);
        }
        if (v.contains("strategy")) {
            const auto& s = v.at("strategy");
            c.ev.strategies.clear();
            if (s == "both") {
                c.ev.strategies = {Strategy::Uncontrolled, Strategy::GridOriented};
            } else if (s.is_string()) {
                c.ev.strategies = {parse_strategy(s.get<std::string>())};
            } else if (s.is_array()) {
                for (const auto& x : s) c.ev.strategies.push_back(parse_strategy(x.get<std::string>()));
            } else {
                throw ConfigError("ev.strategy must be a name, a list of names or \"both\"");
            }
        }
        if (v.contains("limit_w") && !(v.at("limit_w").is_string() && v.at("limit_w") == "derive"))
            read(v, "limit_w", c.ev.limit_w);
        read(v, "forecaster", c.ev.forecaster);
        read(v, "seeds", c.ev.seeds);
        read(v, "seed", c.ev.seed);
        if (c.ev.seed) c.ev.sessions.seed = *c.ev.seed;
        read(v, "profiles_file", c.ev.profiles_file);
        read(v, "profiles", c.ev.sessions.profiles);
        read(v, "weekend_probability", c.ev.sessions.weekend_probability);
        read(v, "weekend_visitors", c.ev.sessions.weekend_visitors);
        read(v, "consumption_kwh_per_100km", c.ev.sessions.consumption_kwh_per_100km);
        read(v, "min_commute_km", c.ev.sessions.min_commute_km);
        read(v, "max_commute_km", c.ev.sessions.max_commute_km);
    }
    c.ev.sessions.step_seconds = e.step_seconds;
    if (j.contains("sweep")) {
        const auto& s = j.at("sweep");
        check_keys(s, {"kinds", "layers", "neurons"}, "sweep");
        if (s.contains("kinds")) {
            c.sweep.kinds.clear();
            for (const auto& k : s.at("kinds")) c.sweep.kinds.push_back(parse_network_kind(k.get<std::string>()));
        }
        read(s, "layers", c.sweep.layers);
        read(s, "neurons", c.sweep.neurons);
    }
    c.validate();
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path.string()));
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("{}: not valid JSON: {}", path.string(), e.what()));
    }
    return parse_config(j);
}

json to_json(const RunConfig& c) {
    const auto opt = [](const auto& v) -> json { return v ? json(*v) : json(nullptr); };
    const auto& e = c.engine;
    json j;
    j["seed"] = c.seed;
    j["step_s"] = e.step_seconds;
    j["horizon_steps"] = e.horizon_steps;
    j["window_days"] = e.window_days;
    j["lead_in_days"] = e.lead_in_days;
    j["max_steps"] = opt(e.max_steps);
    j["nn_refit"] = e.nn_refit_seconds;
    j["pslp_refit"] = format_clock(e.pslp_refit_second_of_day);
    j["mape_mode"] = e.mape_mode == MapeMode::Forecast ? "forecast" : "actual";
    j["force_forecast"] = e.force_forecast;
    j["export_full_forecasts"] = c.export_full_forecasts;
    j["forecasters"] = c.forecasters;
    j["train"] = {{"max_epochs", c.train.max_epochs},
                  {"patience", c.train.patience},
                  {"learning_rate", c.train.adam.learning_rate},
                  {"beta1", c.train.adam.beta1},
                  {"beta2", c.train.adam.beta2},
                  {"epsilon", c.train.adam.epsilon},
                  {"batch_size", c.train.batch_size},
                  {"min_delta", c.train.min_delta},
                  {"lookback", c.lookback},
                  {"min_samples", c.nn_min_samples}};
    j["slp"] = {{"annual_kwh", opt(c.slp_annual_kwh)}, {"profile_file", opt(c.slp_profile_file)}};
    const auto& b = c.data.building;
    j["data"] = {{"load", opt(c.data.load_csv)},
                 {"temperature", opt(c.data.temperature_csv)},
                 {"holidays", opt(c.data.holidays_file)},
                 {"german_holidays", c.data.german_holidays},
                 {"generate",
                  {{"start", b.start.date().iso()},
                   {"days", b.days},
                   {"mean_kw", b.mean_kw},
                   {"max_kw", b.max_kw},
                   {"base_kw", b.base_kw},
                   {"weekend_fraction", b.weekend_fraction},
                   {"noise", b.noise},
                   {"peaks_per_day", b.peaks_per_day},
                   {"peak_at_max", b.peak_at_max},
                   {"rise_start", format_clock(b.rise_start_s)},
                   {"rise_end", format_clock(b.rise_end_s)},
                   {"fall_start", format_clock(b.fall_start_s)},
                   {"fall_end", format_clock(b.fall_end_s)},
                   {"temperature_mean_c", c.data.weather.annual_mean_c},
                   {"temperature_noise_c", c.data.weather.noise_c}}}};
    json strategies = json::array();
    for (auto s : c.ev.strategies) strategies.push_back(to_string(s));
    j["ev"] = {{"stations", c.ev.stations},
               {"strategy", strategies},
               {"limit_w", c.ev.limit_w ? json(*c.ev.limit_w) : json("derive")},
               {"forecaster", c.ev.forecaster},
               {"seeds", c.ev.seeds},
               {"seed", opt(c.ev.seed)},
               {"profiles_file", opt(c.ev.profiles_file)},
               {"profiles", c.ev.sessions.profiles},
               {"weekend_probability", c.ev.sessions.weekend_probability},
               {"weekend_visitors", c.ev.sessions.weekend_visitors},
               {"consumption_kwh_per_100km", c.ev.sessions.consumption_kwh_per_100km},
               {"min_commute_km", c.ev.sessions.min_commute_km},
               {"max_commute_km", c.ev.sessions.max_commute_km}};
    json kinds = json::array();
    for (auto k : c.sweep.kinds) kinds.push_back(to_string(k));
    j["sweep"] = {{"kinds", kinds}, {"layers", c.sweep.layers}, {"neurons", c.sweep.neurons}};
    return j;
}

} // namespace loadcast
