#include <iostream>

#include <CLI11.hpp>

#include "loadcast/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"loadcast: building load forecasting and EV charging studies"};
    app.require_subcommand(1);

    loadcast::CommandOptions options;
    std::string config_path;
    std::uint64_t seed = 0;

    const std::vector<std::pair<std::string, std::string>> commands{
        {"gen-data", "Write a synthetic building load, temperature, holidays and driver profiles"},
        {"correlate", "Monthly correlation of the forecast features with the load"},
        {"simulate-forecast", "Rolling-origin forecast simulation for the configured roster"},
        {"sweep", "Neural architecture sweep over layers x neurons"},
        {"ev-study", "EV charging scenarios with uncontrolled and grid-oriented strategies"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "JSON config or a previous run manifest")->check(CLI::ExistingFile);
        sub->add_option("--out", options.out, "Output directory")->required();
        sub->add_option("--seed", seed, "Override the config seed");
        sub->add_flag("--overwrite", options.overwrite, "Replace a non-empty output directory");
        if (name == "sweep") sub->add_flag("--timing", options.timing, "Add training times to sweep.csv");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : loadcast::kExitConfig;
    }

    options.command = app.get_subcommands().front()->get_name();
    if (!config_path.empty()) options.config = config_path;
    if (app.get_subcommands().front()->count("--seed") > 0) options.seed = seed;
    return loadcast::run_command(options, std::cerr);
}
