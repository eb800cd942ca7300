#include "loadcast/network.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "loadcast/errors.hpp"
#include "loadcast/random.hpp"

namespace loadcast {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd sigmoid(const MatrixXd& x) { return (1.0 + (-x.array()).exp()).inverse().matrix(); }

void activate(MatrixXd& z, Activation act) {
    if (act == Activation::Relu) z = z.cwiseMax(0.0);
}

struct LstmStepCache {
    MatrixXd zin;    // [h_{t-1}, x_t]
    MatrixXd gates;  // f, i, o (sigmoid) and candidate (tanh), N x 4u
    MatrixXd c_prev;
    MatrixXd tanh_c;
};

struct ForwardCache {
    std::vector<std::vector<LstmStepCache>> lstm;  // [layer][t]
    std::vector<MatrixXd> dense_in;
    std::vector<MatrixXd> dense_z;
};

// Runs one LSTM layer over a sequence; fills `cache` when non-null.
std::vector<MatrixXd> lstm_sequence(const LstmLayer& layer, const std::vector<MatrixXd>& xs,
                                    std::vector<LstmStepCache>* cache) {
    const Index n = xs.front().rows();
    const Index u = layer.units();
    const Index d = layer.inputs();
    MatrixXd h = MatrixXd::Zero(n, u);
    MatrixXd c = MatrixXd::Zero(n, u);
    std::vector<MatrixXd> out;
    out.reserve(xs.size());
    if (cache) cache->resize(xs.size());
    for (std::size_t t = 0; t < xs.size(); ++t) {
        if (xs[t].cols() != d) throw ShapeError(fmt::format("lstm: expected {} inputs, got {}", d, xs[t].cols()));
        MatrixXd zin(n, u + d);
        zin.leftCols(u) = h;
        zin.rightCols(d) = xs[t];
        MatrixXd g = zin * layer.weights;
        g.rowwise() += layer.bias.transpose();
        g.leftCols(3 * u) = sigmoid(g.leftCols(3 * u));
        g.rightCols(u) = g.rightCols(u).array().tanh().matrix();
        MatrixXd c_prev = c;
        c = g.leftCols(u).cwiseProduct(c_prev) + g.middleCols(u, u).cwiseProduct(g.rightCols(u));
        MatrixXd tc = c.array().tanh().matrix();
        h = g.middleCols(2 * u, u).cwiseProduct(tc);
        out.push_back(h);
        if (cache) {
            auto& s = (*cache)[t];
            s.zin = std::move(zin);
            s.gates = std::move(g);
            s.c_prev = std::move(c_prev);
            s.tanh_c = std::move(tc);
        }
    }
    return out;
}

void append(VectorXd& out, Index& at, const MatrixXd& m) {
    out.segment(at, m.size()) = Eigen::Map<const VectorXd>(m.data(), m.size());
    at += m.size();
}

void append(VectorXd& out, Index& at, const VectorXd& v) {
    out.segment(at, v.size()) = v;
    at += v.size();
}

void extract(const VectorXd& flat, Index& at, MatrixXd& m) {
    Eigen::Map<VectorXd>(m.data(), m.size()) = flat.segment(at, m.size());
    at += m.size();
}

void extract(const VectorXd& flat, Index& at, VectorXd& v) {
    v = flat.segment(at, v.size());
    at += v.size();
}

void fill_uniform(MatrixXd& m, double limit, Rng& rng) {
    for (Index j = 0; j < m.cols(); ++j)
        for (Index i = 0; i < m.rows(); ++i) m(i, j) = rng.uniform(-limit, limit);
}

} // namespace

void NetworkConfig::validate() const {
    if (hidden_layers < kMinHiddenLayers || hidden_layers > kMaxHiddenLayers)
        throw ConfigError(fmt::format("hidden layers must be in [{}, {}], got {}", kMinHiddenLayers,
                                      kMaxHiddenLayers, hidden_layers));
    if (neurons < 1 || neurons > kNeuronGrid.back())
        throw ConfigError(fmt::format("neurons per layer must be in [1, {}], got {}", kNeuronGrid.back(), neurons));
    if (kind == NetworkKind::Lstm && lookback < 1)
        throw ConfigError(fmt::format("lstm lookback must be >= 1, got {}", lookback));
    if (inputs < 1) throw ConfigError("network needs at least one input");
}

std::string NetworkConfig::label() const {
    return fmt::format("{}-{}x{}", to_string(kind), hidden_layers, neurons);
}

std::string to_string(NetworkKind kind) { return kind == NetworkKind::Lstm ? "lstm" : "ffnn"; }

NetworkKind parse_network_kind(const std::string& text) {
    if (text == "ffnn") return NetworkKind::Ffnn;
    if (text == "lstm") return NetworkKind::Lstm;
    throw ConfigError(fmt::format("unknown network kind '{}'", text));
}

DenseLayer::DenseLayer(int inputs, int outputs, Activation act)
    : weights(MatrixXd::Zero(inputs, outputs)), bias(VectorXd::Zero(outputs)), activation(act) {}

Eigen::VectorXd dense_forward(const DenseLayer& layer, const Eigen::VectorXd& inputs) {
    if (inputs.size() != layer.inputs())
        throw ShapeError(fmt::format("dense: expected {} inputs, got {}", layer.inputs(), inputs.size()));
    VectorXd out = layer.weights.transpose() * inputs + layer.bias;
    if (layer.activation == Activation::Relu) out = out.cwiseMax(0.0);
    return out;
}

LstmLayer::LstmLayer(int inputs, int units)
    : weights(MatrixXd::Zero(units + inputs, 4 * units)),
      bias(VectorXd::Zero(4 * units)),
      h(VectorXd::Zero(units)),
      c(VectorXd::Zero(units)) {}

void LstmLayer::reset_state() {
    h.setZero(units());
    c.setZero(units());
}

Eigen::VectorXd lstm_step(LstmLayer& layer, const Eigen::VectorXd& x) {
    if (x.size() != layer.inputs())
        throw ShapeError(fmt::format("lstm: expected {} inputs, got {}", layer.inputs(), x.size()));
    const Index u = layer.units();
    VectorXd zin(u + x.size());
    zin << layer.h, x;
    VectorXd g = layer.weights.transpose() * zin + layer.bias;
    VectorXd f = sigmoid(g.segment(0, u));
    VectorXd i = sigmoid(g.segment(u, u));
    VectorXd o = sigmoid(g.segment(2 * u, u));
    VectorXd cand = g.segment(3 * u, u).array().tanh().matrix();
    layer.c = f.cwiseProduct(layer.c) + i.cwiseProduct(cand);
    layer.h = o.cwiseProduct(layer.c.array().tanh().matrix());
    return layer.h;
}

SequenceBatch SequenceBatch::subset(const std::vector<Eigen::Index>& rows) const {
    SequenceBatch out;
    out.steps.reserve(steps.size());
    for (const auto& s : steps) out.steps.push_back(s(rows, Eigen::all));
    return out;
}

SequenceBatch make_sequences(const Eigen::MatrixXd& rows, int context) {
    if (context < 1) throw ShapeError("make_sequences: context must be >= 1");
    if (rows.rows() < context)
        throw ShapeError(fmt::format("need at least {} rows of context, got {}", context, rows.rows()));
    const Index samples = rows.rows() - context + 1;
    SequenceBatch b;
    b.steps.reserve(static_cast<std::size_t>(context));
    for (int t = 0; t < context; ++t) b.steps.push_back(rows.middleRows(t, samples));
    return b;
}

double loss_value(const Eigen::VectorXd& predictions, const Eigen::VectorXd& targets, LossKind loss) {
    if (predictions.size() != targets.size() || predictions.size() == 0)
        throw ShapeError("loss: prediction/target size mismatch");
    const auto diff = (predictions - targets).array();
    return loss == LossKind::Mae ? diff.abs().mean() : diff.square().mean();
}

Network::Network(const NetworkConfig& config) : config_(config) {
    config_.validate();
    int width = config_.inputs;
    if (config_.kind == NetworkKind::Lstm) {
        for (int l = 0; l < config_.hidden_layers; ++l) {
            lstm_.emplace_back(width, config_.neurons);
            width = config_.neurons;
        }
    } else {
        for (int l = 0; l < config_.hidden_layers; ++l) {
            dense_.emplace_back(width, config_.neurons, config_.hidden_activation);
            width = config_.neurons;
        }
    }
    dense_.emplace_back(width, 1, Activation::Linear);
}

Network Network::initialized(const NetworkConfig& config, std::uint64_t seed) {
    Network net(config);
    Rng rng(seed);
    for (auto& layer : net.lstm_) {
        fill_uniform(layer.weights, std::sqrt(3.0 / static_cast<double>(layer.weights.rows())), rng);
        layer.bias.setZero();
        layer.bias.head(layer.units()).setOnes();
    }
    for (auto& layer : net.dense_) {
        const double fan_in = static_cast<double>(layer.inputs());
        const double gain = layer.activation == Activation::Relu ? 6.0 : 3.0;
        fill_uniform(layer.weights, std::sqrt(gain / fan_in), rng);
        layer.bias.setZero();
    }
    return net;
}

std::size_t Network::parameter_count() const {
    Index n = 0;
    for (const auto& l : lstm_) n += l.weights.size() + l.bias.size();
    for (const auto& l : dense_) n += l.weights.size() + l.bias.size();
    return static_cast<std::size_t>(n);
}

Eigen::VectorXd Network::parameters() const {
    VectorXd out(static_cast<Index>(parameter_count()));
    Index at = 0;
    for (const auto& l : lstm_) {
        append(out, at, l.weights);
        append(out, at, l.bias);
    }
    for (const auto& l : dense_) {
        append(out, at, l.weights);
        append(out, at, l.bias);
    }
    return out;
}

void Network::set_parameters(const Eigen::VectorXd& flat) {
    if (static_cast<std::size_t>(flat.size()) != parameter_count())
        throw ShapeError(fmt::format("expected {} parameters, got {}", parameter_count(), flat.size()));
    Index at = 0;
    for (auto& l : lstm_) {
        extract(flat, at, l.weights);
        extract(flat, at, l.bias);
    }
    for (auto& l : dense_) {
        extract(flat, at, l.weights);
        extract(flat, at, l.bias);
    }
}

namespace {

Eigen::VectorXd run_forward(const NetworkConfig& config, const std::vector<LstmLayer>& lstm,
                            const std::vector<DenseLayer>& dense, const SequenceBatch& batch, ForwardCache* cache) {
    if (batch.steps.empty()) throw ShapeError("forward: empty batch");
    const auto expected_steps = static_cast<std::size_t>(config.context());
    if (batch.steps.size() != expected_steps)
        throw ShapeError(fmt::format("forward: expected {} time steps, got {}", expected_steps, batch.steps.size()));

    MatrixXd a;
    if (!lstm.empty()) {
        if (cache) cache->lstm.resize(lstm.size());
        std::vector<MatrixXd> seq = batch.steps;
        for (std::size_t l = 0; l < lstm.size(); ++l)
            seq = lstm_sequence(lstm[l], seq, cache ? &cache->lstm[l] : nullptr);
        a = std::move(seq.back());
    } else {
        a = batch.steps.front();
    }
    if (cache) {
        cache->dense_in.resize(dense.size());
        cache->dense_z.resize(dense.size());
    }
    for (std::size_t l = 0; l < dense.size(); ++l) {
        if (a.cols() != dense[l].inputs())
            throw ShapeError(fmt::format("dense: expected {} inputs, got {}", dense[l].inputs(), a.cols()));
        MatrixXd z = a * dense[l].weights;
        z.rowwise() += dense[l].bias.transpose();
        if (cache) {
            cache->dense_in[l] = std::move(a);
            cache->dense_z[l] = z;
        }
        activate(z, dense[l].activation);
        a = std::move(z);
    }
    return a.col(0);
}

} // namespace

Eigen::VectorXd Network::forward(const SequenceBatch& batch) const {
    return run_forward(config_, lstm_, dense_, batch, nullptr);
}

double Network::loss_and_gradient(const SequenceBatch& batch, const Eigen::VectorXd& targets, LossKind loss,
                                  Eigen::VectorXd* gradient) const {
    if (targets.size() != batch.samples()) throw ShapeError("loss: target count does not match batch");
    if (!gradient) return loss_value(forward(batch), targets, loss);

    ForwardCache cache;
    const VectorXd pred = run_forward(config_, lstm_, dense_, batch, &cache);
    const double value = loss_value(pred, targets, loss);
    const double n = static_cast<double>(pred.size());
    const VectorXd diff = pred - targets;
    MatrixXd da(pred.size(), 1);
    if (loss == LossKind::Mae)
        da.col(0) = diff.unaryExpr([n](double e) { return (e > 0 ? 1.0 : (e < 0 ? -1.0 : 0.0)) / n; });
    else
        da.col(0) = 2.0 * diff / n;

    std::vector<MatrixXd> dense_dw(dense_.size());
    std::vector<VectorXd> dense_db(dense_.size());
    for (std::size_t k = dense_.size(); k-- > 0;) {
        MatrixXd dz = std::move(da);
        if (dense_[k].activation == Activation::Relu)
            dz = dz.cwiseProduct((cache.dense_z[k].array() > 0.0).cast<double>().matrix());
        dense_dw[k] = cache.dense_in[k].transpose() * dz;
        dense_db[k] = dz.colwise().sum().transpose();
        da = dz * dense_[k].weights.transpose();
    }

    std::vector<MatrixXd> lstm_dw(lstm_.size());
    std::vector<VectorXd> lstm_db(lstm_.size());
    if (!lstm_.empty()) {
        const std::size_t steps = batch.steps.size();
        // Gradient w.r.t. each layer's output sequence; only the last step feeds the head.
        std::vector<MatrixXd> dh_seq(steps, MatrixXd::Zero(da.rows(), da.cols()));
        dh_seq.back() = da;
        for (std::size_t l = lstm_.size(); l-- > 0;) {
            const auto& layer = lstm_[l];
            const Index u = layer.units();
            const Index d = layer.inputs();
            const Index rows = dh_seq.back().rows();
            MatrixXd dw = MatrixXd::Zero(layer.weights.rows(), layer.weights.cols());
            VectorXd db = VectorXd::Zero(layer.bias.size());
            MatrixXd dh_next = MatrixXd::Zero(rows, u);
            MatrixXd dc_next = MatrixXd::Zero(rows, u);
            std::vector<MatrixXd> dx_seq(steps);
            for (std::size_t t = steps; t-- > 0;) {
                const auto& s = cache.lstm[l][t];
                const auto f = s.gates.leftCols(u).array();
                const auto i = s.gates.middleCols(u, u).array();
                const auto o = s.gates.middleCols(2 * u, u).array();
                const auto g = s.gates.rightCols(u).array();
                const auto tc = s.tanh_c.array();
                const Eigen::ArrayXXd dh = (dh_seq[t] + dh_next).array();
                const Eigen::ArrayXXd dc = dh * o * (1.0 - tc.square()) + dc_next.array();
                MatrixXd dgates(rows, 4 * u);
                dgates.leftCols(u) = (dc * s.c_prev.array() * f * (1.0 - f)).matrix();
                dgates.middleCols(u, u) = (dc * g * i * (1.0 - i)).matrix();
                dgates.middleCols(2 * u, u) = (dh * tc * o * (1.0 - o)).matrix();
                dgates.rightCols(u) = (dc * i * (1.0 - g.square())).matrix();
                dc_next = (dc * f).matrix();
                dw.noalias() += s.zin.transpose() * dgates;
                db += dgates.colwise().sum().transpose();
                MatrixXd dzin = dgates * layer.weights.transpose();
                dh_next = dzin.leftCols(u);
                dx_seq[t] = dzin.rightCols(d);
            }
            lstm_dw[l] = std::move(dw);
            lstm_db[l] = std::move(db);
            dh_seq = std::move(dx_seq);
        }
    }

    gradient->resize(static_cast<Index>(parameter_count()));
    Index at = 0;
    for (std::size_t l = 0; l < lstm_.size(); ++l) {
        append(*gradient, at, lstm_dw[l]);
        append(*gradient, at, lstm_db[l]);
    }
    for (std::size_t l = 0; l < dense_.size(); ++l) {
        append(*gradient, at, dense_dw[l]);
        append(*gradient, at, dense_db[l]);
    }
    return value;
}

Eigen::VectorXd Network::predict(const Eigen::MatrixXd& rows) const {
    return forward(make_sequences(rows, config_.context()));
}

} // namespace loadcast
