#include "loadcast/export.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "loadcast/errors.hpp"

namespace loadcast {

using nlohmann::json;
namespace fs = std::filesystem;

std::string sha256_hex(std::istream& in) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error("sha256: digest init failed");
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md, &len);
    std::string hex;
    for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
    return hex;
}

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(fmt::format("cannot read '{}' for hashing", path.string()));
    return sha256_hex(in);
}

RunDirectory::RunDirectory(fs::path target, bool overwrite) : target_(std::move(target)), overwrite_(overwrite) {
    if (target_.empty()) throw ConfigError("output directory must not be empty");
    std::error_code ec;
    if (fs::exists(target_, ec)) {
        if (!fs::is_directory(target_)) throw ConfigError(fmt::format("'{}' exists and is not a directory", target_.string()));
        if (!fs::is_empty(target_) && !overwrite_)
            throw ConfigError(fmt::format("output directory '{}' is not empty; pass --overwrite to replace it",
                                          target_.string()));
    }
    const fs::path absolute = fs::absolute(target_).lexically_normal();
    const fs::path parent = absolute.has_filename() ? absolute.parent_path() : absolute.parent_path().parent_path();
    const std::string name = absolute.has_filename() ? absolute.filename().string() : absolute.parent_path().filename().string();
    fs::create_directories(parent);
    staging_ = parent / ("." + name + ".partial");
    fs::remove_all(staging_);
    if (!fs::create_directory(staging_, ec) || ec)
        throw DataError(fmt::format("cannot create staging directory '{}': {}", staging_.string(), ec.message()));
}

RunDirectory::~RunDirectory() {
    if (!committed_) {
        std::error_code ec;
        fs::remove_all(staging_, ec);
    }
}

fs::path RunDirectory::file(const std::string& name) const { return staging_ / name; }

std::ofstream RunDirectory::open(const std::string& name) const {
    std::ofstream out(file(name), std::ios::binary);
    if (!out) throw DataError(fmt::format("cannot write '{}'", file(name).string()));
    return out;
}

std::vector<std::string> RunDirectory::files() const {
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(staging_))
        if (entry.is_regular_file()) names.push_back(entry.path().filename().string());
    std::sort(names.begin(), names.end());
    return names;
}

void RunDirectory::commit() {
    std::error_code ec;
    if (fs::exists(target_, ec)) {
        if (!fs::is_empty(target_) && !overwrite_)
            throw ConfigError(fmt::format("output directory '{}' appeared while running", target_.string()));
        fs::remove_all(target_, ec);
        if (ec) throw DataError(fmt::format("cannot replace '{}': {}", target_.string(), ec.message()));
    }
    fs::rename(staging_, target_, ec);
    if (ec) throw DataError(fmt::format("cannot move results into '{}': {}", target_.string(), ec.message()));
    committed_ = true;
}

json make_manifest(const std::string& command, const json& config, const std::vector<fs::path>& inputs,
                   const RunDirectory& dir, const std::string& status) {
    json j;
    j["format"] = "loadcast-manifest";
    j["version"] = 1;
    j["command"] = command;
    j["status"] = status;
    j["seed"] = config.at("seed");
    j["config"] = config;
    json in = json::array();
    for (const auto& p : inputs) in.push_back({{"path", p.string()}, {"sha256", sha256_file(p)}});
    j["inputs"] = in;
    json out = json::array();
    for (const auto& name : dir.files())
        if (name != "manifest.json") out.push_back({{"file", name}, {"sha256", sha256_file(dir.file(name))}});
    j["outputs"] = out;
    return j;
}

void write_json(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

namespace {

std::string opt(const std::optional<double>& v) { return v ? fmt::format("{}", *v) : std::string(); }

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json boxplot_json(std::vector<double> values) {
    if (values.empty()) return nullptr;
    const auto b = boxplot_summary(values);
    return {{"n", b.n},          {"min", b.min},
            {"q1", b.q1},        {"median", b.median},
            {"q3", b.q3},        {"max", b.max},
            {"lower_whisker", b.lower_whisker}, {"upper_whisker", b.upper_whisker},
            {"outliers", b.outliers}};
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"') q += '"';
        q += ch;
    }
    return q + "\"";
}

} // namespace

void write_metrics_csv(std::ostream& out, std::span<const ErrorReport> reports) {
    out << "issued_at,h,mae_w,rmse_w,mape_pct,mase\n";
    for (const auto& r : reports)
        out << fmt::format("{},{},{},{},{},{}\n", r.issued_at.iso(), r.h, r.mae_w, r.rmse_w, opt(r.mape_pct), opt(r.mase));
}

json summary_json(const SimulationRun& run) {
    json j;
    j["first_step"] = run.first_step.iso();
    j["steps"] = run.steps;
    json tracks = json::object();
    for (const auto& t : run.tracks) {
        const auto avg = aggregate(t.reports);
        std::vector<double> mae, rmse, mape, mase;
        for (const auto& r : t.reports) {
            mae.push_back(r.mae_w);
            rmse.push_back(r.rmse_w);
            if (r.mape_pct) mape.push_back(*r.mape_pct);
            if (r.mase) mase.push_back(*r.mase);
        }
        tracks[t.name] = {{"issuances", t.reports.size()},
                          {"abstained_steps", t.abstained},
                          {"aggregate",
                           {{"mae_w", avg.mae_w},
                            {"rmse_w", avg.rmse_w},
                            {"mape_pct", opt_json(avg.mape_pct)},
                            {"mase", opt_json(avg.mase)}}},
                          {"boxplot",
                           {{"mae_w", boxplot_json(mae)},
                            {"rmse_w", boxplot_json(rmse)},
                            {"mape_pct", boxplot_json(mape)},
                            {"mase", boxplot_json(mase)}}}};
    }
    j["forecasters"] = tracks;
    return j;
}

void write_refit_log(std::ostream& out, std::span<const RefitRecord> refits) {
    out << "forecaster,issued_at,action,first_sample,last_sample,samples,epochs,loss\n";
    for (const auto& r : refits)
        out << fmt::format("{},{},{},{},{},{},{},{}\n", r.forecaster, r.issued_at.iso(), r.action, r.first_sample.iso(),
                           r.last_sample.iso(), r.samples, r.epochs, r.loss);
}

void write_annotations(std::ostream& out, std::span<const Annotation> annotations) {
    out << "forecaster,reason,first_step,last_step,steps,message\n";
    for (const auto& a : annotations)
        out << fmt::format("{},{},{},{},{},{}\n", a.forecaster, to_string(a.reason), a.first.iso(), a.last.iso(),
                           a.steps, csv_field(a.message));
}

void write_plot_xy(std::ostream& out, const std::string& x_label, const std::string& y_label,
                   const std::vector<std::pair<std::string, double>>& rows) {
    out << x_label << ',' << y_label << '\n';
    for (const auto& [x, y] : rows) out << fmt::format("{},{}\n", x, y);
}

json quality_json(const QualityReport& q) {
    return {{"native_step_s", q.native_step_seconds},
            {"raw_readings", q.raw_readings},
            {"slots", q.slots},
            {"missing_slots", q.missing_slots},
            {"duplicates", q.duplicates},
            {"invalid", q.invalid},
            {"longest_gap_slots", q.longest_gap},
            {"reordered", q.reordered},
            {"missing_pct", q.missing_pct},
            {"double_pct", q.double_pct},
            {"incorrect_pct", q.incorrect_pct}};
}

void write_correlation_csv(std::ostream& out, const CorrelationReport& report) {
    out << "feature";
    for (const auto& m : report.months) out << ',' << m;
    out << ",overall\n";
    for (std::size_t f = 0; f < report.features.size(); ++f) {
        out << report.features[f];
        for (const auto& cell : report.monthly[f]) out << ',' << opt(cell);
        out << ',' << opt(report.overall[f]) << '\n';
    }
}

std::vector<DriverProfile> read_driver_profiles(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(fmt::format("cannot open driver profiles '{}'", path.string()));
    std::string line;
    std::size_t line_no = 0;
    std::vector<DriverProfile> out;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line_no == 1) {
            if (line != "id,commute_km,arrival_offset_s,departure_offset_s,battery_kwh,max_charge_w")
                throw DataError(fmt::format("{}:1: unexpected header '{}'", path.string(), line));
            continue;
        }
        std::istringstream row(line);
        DriverProfile p;
        char c1 = 0, c2 = 0, c3 = 0, c4 = 0, c5 = 0;
        row >> p.id >> c1 >> p.commute_km >> c2 >> p.arrival_offset_s >> c3 >> p.departure_offset_s >> c4 >>
            p.vehicle.battery_kwh >> c5 >> p.vehicle.max_charge_w;
        if (!row || c1 != ',' || c2 != ',' || c3 != ',' || c4 != ',' || c5 != ',' || !(row >> std::ws).eof())
            throw DataError(fmt::format("{}:{}: malformed profile row", path.string(), line_no));
        if (p.vehicle.battery_kwh < kMinBatteryKwh || p.vehicle.battery_kwh > kMaxBatteryKwh || p.commute_km < 0 ||
            p.vehicle.max_charge_w <= 0)
            throw DataError(fmt::format("{}:{}: profile values out of range", path.string(), line_no));
        out.push_back(p);
    }
    if (out.empty()) throw DataError(fmt::format("{}: no driver profiles", path.string()));
    return out;
}

void write_driver_profiles(std::ostream& out, std::span<const DriverProfile> profiles) {
    out << "id,commute_km,arrival_offset_s,departure_offset_s,battery_kwh,max_charge_w\n";
    for (const auto& p : profiles)
        out << fmt::format("{},{},{},{},{},{}\n", p.id, p.commute_km, p.arrival_offset_s, p.departure_offset_s,
                           p.vehicle.battery_kwh, p.vehicle.max_charge_w);
}

std::string format_duration(double seconds) {
    const auto minutes = static_cast<long long>(std::llround(seconds / 60.0));
    return fmt::format("{:02d}:{:02d}", minutes / 60, minutes % 60);
}

void write_scenarios_csv(std::ostream& out, std::span<const ScenarioRow> rows) {
    out << "seed,stations,strategy,limit_w,registered_overloads,max_overload_kw,mean_overload_kw,sessions,"
           "avg_energy_kwh,avg_charging_duration,unplanned_steps\n";
    for (const auto& r : rows) {
        const auto& s = r.result.stats;
        out << fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", r.seed, r.result.scenario.stations,
                           to_string(r.result.scenario.strategy), r.result.scenario.limit_w, s.registered_overloads,
                           s.max_overload_w / 1000.0, s.mean_overload_w / 1000.0, s.sessions_charged, s.avg_energy_kwh,
                           format_duration(s.avg_charging_seconds), r.result.unplanned_steps);
    }
}

void write_scenarios_text(std::ostream& out, std::span<const ScenarioRow> rows) {
    out << "Registered overloads count 5-minute steps in which building load plus charging exceeds the limit.\n\n";
    out << fmt::format("{:>6} {:>8} {:>13} {:>10} {:>13} {:>13} {:>9} {:>12} {:>10}\n", "seed", "stations", "strategy",
                       "overloads", "max ovl [kW]", "mean ovl [kW]", "sessions", "energy [kWh]", "duration");
    for (const auto& r : rows) {
        const auto& s = r.result.stats;
        out << fmt::format("{:>6} {:>8} {:>13} {:>10} {:>13.2f} {:>13.2f} {:>9} {:>12.2f} {:>10}\n", r.seed,
                           r.result.scenario.stations, to_string(r.result.scenario.strategy), s.registered_overloads,
                           s.max_overload_w / 1000.0, s.mean_overload_w / 1000.0, s.sessions_charged, s.avg_energy_kwh,
                           format_duration(s.avg_charging_seconds));
    }
}

void write_sessions_csv(std::ostream& out, std::span<const ScenarioRow> rows) {
    out << "seed,stations,strategy,session,profile,station,arrival,departure,connected,battery_kwh,max_charge_w,"
           "soc_in,soc_out,delivered_kwh,charging_seconds\n";
    for (const auto& r : rows)
        for (const auto& o : r.result.sessions) {
            const auto& s = o.session;
            out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.seed, r.result.scenario.stations,
                               to_string(r.result.scenario.strategy), s.id, s.profile, o.station, s.arrival.iso(),
                               s.departure.iso(), o.connected ? o.connected->iso() : std::string(), s.vehicle.battery_kwh,
                               s.vehicle.max_charge_w, s.soc_in, o.soc_out, o.delivered_kwh, o.charging_seconds);
        }
}

} // namespace loadcast
