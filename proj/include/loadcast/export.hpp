#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "loadcast/engine.hpp"
#include "loadcast/ev.hpp"
#include "loadcast/features.hpp"
#include "loadcast/io.hpp"

namespace loadcast {

std::string sha256_hex(std::istream& in);
std::string sha256_file(const std::filesystem::path& path);

/// Output directory that only appears once complete. Files are written into a hidden
/// sibling staging directory which `commit` renames into place. An existing non-empty target
/// is an error unless `overwrite` is set, checked before any work starts.
class RunDirectory {
public:
    RunDirectory(std::filesystem::path target, bool overwrite);
    ~RunDirectory();
    RunDirectory(const RunDirectory&) = delete;
    RunDirectory& operator=(const RunDirectory&) = delete;

    /// Path of `name` inside the staging directory.
    std::filesystem::path file(const std::string& name) const;
    std::ofstream open(const std::string& name) const;
    /// Names of the files written so far, sorted.
    std::vector<std::string> files() const;
    const std::filesystem::path& target() const { return target_; }
    void commit();

private:
    std::filesystem::path target_;
    std::filesystem::path staging_;
    bool overwrite_;
    bool committed_ = false;
};

/// Run manifest: command, seed, resolved config, input and output digests.
nlohmann::json make_manifest(const std::string& command, const nlohmann::json& config,
                             const std::vector<std::filesystem::path>& inputs, const RunDirectory& dir,
                             const std::string& status);
void write_json(std::ostream& out, const nlohmann::json& j);

void write_metrics_csv(std::ostream& out, std::span<const ErrorReport> reports);
nlohmann::json summary_json(const SimulationRun& run);
void write_refit_log(std::ostream& out, std::span<const RefitRecord> refits);
void write_annotations(std::ostream& out, std::span<const Annotation> annotations);
/// x/y columns, one row per issuance, for plotting the error over time.
void write_plot_xy(std::ostream& out, const std::string& x_label, const std::string& y_label,
                   const std::vector<std::pair<std::string, double>>& rows);

nlohmann::json quality_json(const QualityReport& q);
void write_correlation_csv(std::ostream& out, const CorrelationReport& report);

/// `id,commute_km,arrival_offset_s,departure_offset_s,battery_kwh,max_charge_w`
std::vector<DriverProfile> read_driver_profiles(const std::filesystem::path& path);
void write_driver_profiles(std::ostream& out, std::span<const DriverProfile> profiles);

struct ScenarioRow {
    std::uint64_t seed = 0;
    ScenarioResult result;
};

/// Overload statistics per scenario; overloads are counted in 5-minute steps.
void write_scenarios_csv(std::ostream& out, std::span<const ScenarioRow> rows);
void write_scenarios_text(std::ostream& out, std::span<const ScenarioRow> rows);
void write_sessions_csv(std::ostream& out, std::span<const ScenarioRow> rows);

/// Duration as HH:MM.
std::string format_duration(double seconds);

} // namespace loadcast
