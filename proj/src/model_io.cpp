#include "loadcast/model_io.hpp"

#include <fstream>

#include <fmt/format.h>
#include <json.hpp>

#include "loadcast/errors.hpp"

namespace loadcast {

namespace {

using nlohmann::json;

constexpr const char* kFormat = "loadcast-model";
constexpr int kVersion = 1;

json to_json(const Eigen::VectorXd& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

Eigen::VectorXd vector_from(const json& j) {
    const auto values = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

json to_json(const ScalerParams& s) { return {{"min", s.min}, {"max", s.max}, {"warnings", s.warnings}}; }

ScalerParams scaler_from(const json& j) {
    ScalerParams s;
    s.min = j.at("min").get<std::vector<double>>();
    s.max = j.at("max").get<std::vector<double>>();
    s.warnings = j.at("warnings").get<std::vector<std::string>>();
    if (s.min.size() != s.max.size()) throw DataError("model snapshot: scaler min/max length mismatch");
    return s;
}

} // namespace

void save_model(std::ostream& out, const TrainedModel& model) {
    const auto& c = model.network.config();
    json j;
    j["format"] = kFormat;
    j["version"] = kVersion;
    j["config"] = {{"kind", to_string(c.kind)},
                   {"hidden_layers", c.hidden_layers},
                   {"neurons", c.neurons},
                   {"lookback", c.lookback},
                   {"inputs", c.inputs},
                   {"hidden_activation", c.hidden_activation == Activation::Relu ? "relu" : "linear"}};
    j["seed"] = model.seed;
    j["fits"] = model.fits;
    j["parameters"] = to_json(model.network.parameters());
    j["x_scaler"] = to_json(model.x_scaler);
    j["y_scaler"] = to_json(model.y_scaler);
    j["adam"] = {{"m", to_json(model.adam.m)}, {"v", to_json(model.adam.v)}, {"steps", model.adam.steps}};
    j["last_fit"] = {{"loss_history", model.last_fit.loss_history},
                     {"best_epoch", model.last_fit.best_epoch},
                     {"best_loss", model.last_fit.best_loss},
                     {"epochs_run", model.last_fit.epochs_run},
                     {"stopped_early", model.last_fit.stopped_early}};
    out << j.dump(1) << '\n';
}

void save_model(const std::filesystem::path& path, const TrainedModel& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError(fmt::format("cannot write model snapshot '{}'", path.string()));
    save_model(out, model);
    if (!out) throw DataError(fmt::format("failed writing model snapshot '{}'", path.string()));
}

TrainedModel load_model(std::istream& in) {
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw DataError(fmt::format("model snapshot is not valid JSON: {}", e.what()));
    }
    try {
        if (j.at("format") != kFormat) throw DataError("not a loadcast model snapshot");
        if (j.at("version") != kVersion)
            throw DataError(fmt::format("unsupported model snapshot version {}", j.at("version").dump()));
        const auto& jc = j.at("config");
        NetworkConfig c;
        c.kind = parse_network_kind(jc.at("kind").get<std::string>());
        c.hidden_layers = jc.at("hidden_layers").get<int>();
        c.neurons = jc.at("neurons").get<int>();
        c.lookback = jc.at("lookback").get<int>();
        c.inputs = jc.at("inputs").get<int>();
        c.hidden_activation = jc.at("hidden_activation") == "relu" ? Activation::Relu : Activation::Linear;
        TrainedModel model(c);
        model.seed = j.at("seed").get<std::uint64_t>();
        model.fits = j.at("fits").get<int>();
        model.network.set_parameters(vector_from(j.at("parameters")));
        model.x_scaler = scaler_from(j.at("x_scaler"));
        model.y_scaler = scaler_from(j.at("y_scaler"));
        model.adam.m = vector_from(j.at("adam").at("m"));
        model.adam.v = vector_from(j.at("adam").at("v"));
        model.adam.steps = j.at("adam").at("steps").get<std::int64_t>();
        const auto& lf = j.at("last_fit");
        model.last_fit.loss_history = lf.at("loss_history").get<std::vector<double>>();
        model.last_fit.best_epoch = lf.at("best_epoch").get<int>();
        model.last_fit.best_loss = lf.at("best_loss").get<double>();
        model.last_fit.epochs_run = lf.at("epochs_run").get<int>();
        model.last_fit.stopped_early = lf.at("stopped_early").get<bool>();
        return model;
    } catch (const json::exception& e) {
        throw DataError(fmt::format("malformed model snapshot: {}", e.what()));
    } catch (const ShapeError& e) {
        throw DataError(fmt::format("model snapshot does not match its config: {}", e.what()));
    }
}

TrainedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(fmt::format("cannot open model snapshot '{}'", path.string()));
    return load_model(in);
}

} // namespace loadcast
