#include "loadcast/commands.hpp"

#include <fstream>
#include <map>
#include <ostream>

#include <fmt/format.h>

#include "loadcast/config.hpp"
#include "loadcast/errors.hpp"
#include "loadcast/export.hpp"

namespace loadcast {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct LoadedData {
    Dataset data;
    std::vector<fs::path> inputs;
    std::optional<QualityReport> load_quality;
    std::optional<QualityReport> temperature_quality;
};

HolidaySet holidays_for(const RunConfig& config, int first_year, int last_year) {
    if (config.data.holidays_file) return read_holidays(fs::path(*config.data.holidays_file));
    if (config.data.german_holidays) return german_public_holidays(first_year, last_year);
    return {};
}

LoadedData load_data(const RunConfig& config) {
    LoadedData out;
    const auto& src = config.data;
    if (src.load_csv) {
        if (!src.temperature_csv) throw ConfigError("data.load requires data.temperature");
        std::optional<fs::path> holidays;
        if (src.holidays_file) holidays = fs::path(*src.holidays_file);
        auto ingested = ingest(*src.load_csv, *src.temperature_csv, holidays, config.engine.step_seconds);
        out.data = std::move(ingested.data);
        out.load_quality = ingested.load_quality;
        out.temperature_quality = ingested.temperature_quality;
        out.inputs = {*src.load_csv, *src.temperature_csv};
        if (holidays) out.inputs.push_back(*holidays);
        if (!src.holidays_file && src.german_holidays && !out.data.load.empty())
            out.data.holidays = german_public_holidays(out.data.load.start.date().year,
                                                       out.data.load.time_at(out.data.load.size() - 1).date().year);
        return out;
    }
    const auto& b = src.building;
    const Timestamp end = b.start + static_cast<std::int64_t>(b.days) * kSecondsPerDay;
    out.data.holidays = holidays_for(config, b.start.date().year, end.date().year);
    if (src.holidays_file) out.inputs.push_back(*src.holidays_file);
    out.data.load = gen_building_load(b, out.data.holidays);
    out.data.temperature = gen_temperature(src.weather);
    return out;
}

void write_quality(const RunDirectory& dir, const LoadedData& d) {
    if (!d.load_quality) return;
    json j{{"load", quality_json(*d.load_quality)}, {"temperature", quality_json(*d.temperature_quality)}};
    auto out = dir.open("quality.json");
    write_json(out, j);
}

const SlpProfileSet& slp_profiles(const RunConfig& config, std::vector<fs::path>& inputs, SlpProfileSet& storage) {
    if (!config.slp_profile_file) return bundled_g1_profile();
    storage = read_slp_csv(fs::path(*config.slp_profile_file));
    inputs.push_back(*config.slp_profile_file);
    return storage;
}

std::string file_safe(const std::string& name) {
    std::string s = name;
    for (char& ch : s)
        if (ch == ':' || ch == '/' || ch == '\\' || ch == ' ') ch = '_';
    return s;
}

struct ForecastSink {
    const Dataset& data;
    bool full;
    std::map<std::string, std::string> day_ahead;  ///< forecaster -> long-format rows
    std::map<std::string, std::string> wide;

    void operator()(const std::string& name, Timestamp issued, std::span<const double> values) {
        const auto step = data.load.step_seconds;
        if (issued.second_of_day() == 0) {
            auto& rows = day_ahead[name];
            for (std::size_t k = 0; k < values.size(); ++k) {
                const Timestamp t = issued + static_cast<std::int64_t>(k) * step;
                rows += fmt::format("{},{},{},{}\n", issued.iso(), t.iso(), values[k], data.load.at(t));
            }
        }
        if (full) {
            auto& rows = wide[name];
            rows += issued.iso();
            for (double v : values) rows += fmt::format(",{}", v);
            rows += '\n';
        }
    }
};

int simulate_forecast(const RunConfig& config, LoadedData& loaded, RunDirectory& dir, std::ostream& log,
                      std::string& status) {
    SlpProfileSet custom;
    const auto& profiles = slp_profiles(config, loaded.inputs, custom);
    auto roster = make_roster(config, profiles);
    if (roster.empty()) {
        status = "empty-roster";
        log << "simulate-forecast: the forecaster roster is empty; nothing to run\n";
        return kExitRunFailure;
    }
    ForecastSink sink{loaded.data, config.export_full_forecasts, {}, {}};
    const auto result = run(loaded.data, config.engine, roster, std::ref(sink));

    bool any_issued = false;
    for (const auto& track : result.tracks) {
        const auto name = file_safe(track.name);
        any_issued = any_issued || !track.reports.empty();
        {
            auto out = dir.open("metrics_" + name + ".csv");
            write_metrics_csv(out, track.reports);
        }
        std::vector<std::pair<std::string, double>> xy;
        for (const auto& r : track.reports) xy.emplace_back(r.issued_at.iso(), r.mae_w);
        {
            auto out = dir.open("plot_mae_" + name + ".csv");
            write_plot_xy(out, "issued_at", "mae_w", xy);
        }
        {
            auto out = dir.open("forecasts_" + name + ".csv");
            out << "issued_at,timestamp,forecast_w,actual_w\n" << sink.day_ahead[track.name];
        }
        if (config.export_full_forecasts) {
            auto out = dir.open("forecasts_full_" + name + ".csv");
            out << "issued_at";
            for (std::size_t k = 0; k < config.engine.horizon_steps; ++k) out << ",h" << k + 1;
            out << '\n' << sink.wide[track.name];
        }
    }
    {
        auto out = dir.open("summary.json");
        write_json(out, summary_json(result));
    }
    {
        auto out = dir.open("refits.csv");
        write_refit_log(out, result.refits);
    }
    {
        auto out = dir.open("annotations.csv");
        write_annotations(out, result.annotations);
    }
    for (const auto& f : roster)
        if (const auto* nn = dynamic_cast<const NeuralForecaster*>(f.get()); nn && nn->model())
            save_model(dir.file("model_" + file_safe(f->name()) + ".json"), *nn->model());

    if (!any_issued) {
        status = "no-forecasts";
        log << "simulate-forecast: no forecaster issued a forecast\n";
        return kExitRunFailure;
    }
    return kExitOk;
}

int correlate(const LoadedData& loaded, RunDirectory& dir) {
    const auto& load = loaded.data.load;
    const Timestamp from = load.start + 7 * kSecondsPerDay;
    const Timestamp to = load.start + static_cast<std::int64_t>(load.size()) * load.step_seconds;
    if (from >= to) throw DataError("correlate: the load series is shorter than the seven-day lag");
    const auto features = build_features(load, loaded.data.temperature, loaded.data.holidays, from, to);
    auto out = dir.open("correlation.csv");
    write_correlation_csv(out, monthly_correlation_report(features));
    return kExitOk;
}

int gen_data(const RunConfig& config, const LoadedData& loaded, RunDirectory& dir) {
    write_series_csv(dir.file("load.csv"), loaded.data.load, "power_w");
    write_series_csv(dir.file("temperature.csv"), loaded.data.temperature, "temp_c");
    {
        auto out = dir.open("holidays.txt");
        write_holidays(out, loaded.data.holidays);
    }
    {
        auto out = dir.open("driver_profiles.csv");
        write_driver_profiles(out, random_driver_profiles(config.ev.sessions));
    }
    const auto& v = loaded.data.load.values;
    double sum = 0, peak = 0;
    for (double x : v) {
        sum += x;
        peak = std::max(peak, x);
    }
    json stats{{"mean_kw", sum / static_cast<double>(v.size()) / 1000.0},
               {"max_kw", peak / 1000.0},
               {"base_kw", base_load(loaded.data.load) / 1000.0},
               {"samples", v.size()}};
    auto out = dir.open("stats.json");
    write_json(out, stats);
    return kExitOk;
}

int sweep(const RunConfig& config, const LoadedData& loaded, RunDirectory& dir, bool timing, std::string& status) {
    NeuralSettings base;
    base.network.lookback = config.lookback;
    base.train = config.train;
    base.refit_seconds = config.engine.nn_refit_seconds;
    base.min_samples = config.nn_min_samples;
    base.seed = config.seed;
    const auto cells = architecture_sweep(config.sweep, loaded.data, config.engine, base);
    {
        auto out = dir.open("sweep.csv");
        write_sweep_csv(out, cells, timing);
    }
    {
        auto out = dir.open("sweep_table.txt");
        write_sweep_table(out, cells);
    }
    const bool all_failed = std::all_of(cells.begin(), cells.end(), [](const SweepCell& c) { return c.failed; });
    if (all_failed) {
        status = "all-cells-failed";
        return kExitRunFailure;
    }
    return kExitOk;
}

int ev_study(const RunConfig& config, LoadedData& loaded, RunDirectory& dir, std::ostream& log) {
    const auto& ev = config.ev;
    const auto& data = loaded.data;
    const double limit = ev.limit_w.value_or(derive_grid_limit(data.load));
    const auto hours = detect_working_hours(data.load, data.holidays);

    std::vector<DriverProfile> profiles;
    if (ev.profiles_file) {
        profiles = read_driver_profiles(*ev.profiles_file);
        loaded.inputs.push_back(*ev.profiles_file);
    } else {
        profiles = random_driver_profiles(ev.sessions);
    }

    const bool needs_forecast =
        std::find(ev.strategies.begin(), ev.strategies.end(), Strategy::GridOriented) != ev.strategies.end();
    const auto step = data.load.step_seconds;
    const auto horizon = static_cast<std::int64_t>(config.engine.horizon_steps);
    const Timestamp first = data.load.start + static_cast<std::int64_t>(config.engine.lead_in_days) * kSecondsPerDay;
    const Timestamp data_end = data.load.start + static_cast<std::int64_t>(data.load.size()) * step;
    Timestamp last = data_end - horizon * step;
    if (last < first) throw DataError("ev-study: the load series is too short for the lead-in and horizon");

    SimulationRun forecast_run;
    ForecastProvider provider;
    if (ev.forecaster == "perfect") {
        provider = [&data, horizon](Timestamp t) -> std::optional<std::vector<double>> {
            const auto i = data.load.index_of(t);
            if (!i) return std::nullopt;
            const auto n = std::min<std::size_t>(static_cast<std::size_t>(horizon), data.load.size() - *i);
            return std::vector<double>(data.load.values.begin() + static_cast<std::ptrdiff_t>(*i),
                                       data.load.values.begin() + static_cast<std::ptrdiff_t>(*i + n));
        };
    } else if (needs_forecast) {
        RunConfig single = config;
        single.forecasters = {ev.forecaster};
        single.engine.keep_forecasts = true;
        SlpProfileSet custom;
        auto roster = make_roster(single, slp_profiles(config, loaded.inputs, custom));
        forecast_run = run(data, single.engine, roster);
        last = forecast_run.first_step + static_cast<std::int64_t>(forecast_run.steps) * step;
        const auto* track = forecast_run.track(roster.front()->name());
        provider = [track](Timestamp t) -> std::optional<std::vector<double>> {
            if (const auto* f = track->forecast_at(t)) return *f;
            return std::nullopt;
        };
        auto out = dir.open("refits.csv");
        write_refit_log(out, forecast_run.refits);
    }

    std::vector<ScenarioRow> rows;
    for (std::size_t k = 0; k < ev.seeds; ++k) {
        auto gen = ev.sessions;
        gen.seed = ev.sessions.seed + k;
        gen.step_seconds = step;
        const auto sessions = generate_sessions(profiles, first.date(), (last - 1).date(), hours, data.holidays, gen);
        for (std::size_t stations : ev.stations)
            for (Strategy strategy : ev.strategies) {
                Scenario sc{stations, strategy, limit};
                auto result = simulate(sc, sessions, data.load, provider, first, last);
                if (k == 0) {
                    auto out = dir.open(fmt::format("plot_load_{}_{}.csv", stations, to_string(strategy)));
                    out << "timestamp,building_w,charging_w,total_w,limit_w\n";
                    for (std::size_t i = 0; i < result.charging_w.size(); ++i) {
                        const Timestamp t = result.charging_w.time_at(i);
                        const double b = data.load.at(t);
                        const double c = result.charging_w.values[i];
                        out << fmt::format("{},{},{},{},{}\n", t.iso(), b, c, b + c, limit);
                    }
                }
                rows.push_back({gen.seed, std::move(result)});
            }
    }
    {
        auto out = dir.open("scenarios.csv");
        write_scenarios_csv(out, rows);
    }
    {
        auto out = dir.open("scenarios.txt");
        out << fmt::format("Grid limit: {} kW\nPlanning forecast: {}\n", limit / 1000.0, ev.forecaster);
        write_scenarios_text(out, rows);
    }
    {
        auto out = dir.open("sessions.csv");
        write_sessions_csv(out, rows);
    }
    {
        auto out = dir.open("driver_profiles.csv");
        write_driver_profiles(out, profiles);
    }
    log << fmt::format("ev-study: {} scenarios, limit {} kW\n", rows.size(), limit / 1000.0);
    return kExitOk;
}

int dispatch(const CommandOptions& options, const RunConfig& config, RunDirectory& dir, std::ostream& log,
             std::vector<fs::path>& inputs, std::string& status) {
    auto loaded = load_data(config);
    write_quality(dir, loaded);
    int code = kExitOk;
    if (options.command == "gen-data") code = gen_data(config, loaded, dir);
    else if (options.command == "correlate") code = correlate(loaded, dir);
    else if (options.command == "simulate-forecast") code = simulate_forecast(config, loaded, dir, log, status);
    else if (options.command == "sweep") code = sweep(config, loaded, dir, options.timing, status);
    else if (options.command == "ev-study") code = ev_study(config, loaded, dir, log);
    inputs = loaded.inputs;
    return code;
}

} // namespace

int run_command(const CommandOptions& options, std::ostream& log) {
    static const std::vector<std::string> commands{"gen-data", "correlate", "simulate-forecast", "sweep", "ev-study"};
    if (std::find(commands.begin(), commands.end(), options.command) == commands.end()) {
        log << fmt::format("error: unknown command '{}'\n", options.command);
        return kExitConfig;
    }
    RunConfig config;
    std::optional<RunDirectory> dir;
    try {
        if (options.config) config = load_config(*options.config);
        if (options.seed) config.apply_seed(*options.seed);
        config.validate();
        dir.emplace(options.out, options.overwrite);
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const nlohmann::json::exception& e) {
        log << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DataError& e) {
        log << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const fs::filesystem_error& e) {
        log << "data error: " << e.what() << '\n';
        return kExitData;
    }

    std::vector<fs::path> inputs;
    if (options.config) inputs.push_back(*options.config);
    std::string status = "ok";
    int code = kExitOk;
    try {
        std::vector<fs::path> data_inputs;
        code = dispatch(options, config, *dir, log, data_inputs, status);
        inputs.insert(inputs.end(), data_inputs.begin(), data_inputs.end());
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DataError& e) {
        log << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const fs::filesystem_error& e) {
        log << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        log << "run failure: " << e.what() << '\n';
        status = "failed";
        code = kExitRunFailure;
    }

    try {
        const auto manifest = make_manifest(options.command, to_json(config), inputs, *dir, status);
        {
            auto out = dir->open("manifest.json");
            write_json(out, manifest);
        }
        dir->commit();
    } catch (const Error& e) {
        log << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const fs::filesystem_error& e) {
        log << "data error: " << e.what() << '\n';
        return kExitData;
    }
    return code;
}

} // namespace loadcast
