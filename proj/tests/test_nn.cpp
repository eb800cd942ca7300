#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "loadcast/errors.hpp"
#include "loadcast/model_io.hpp"
#include "loadcast/network.hpp"
#include "loadcast/random.hpp"
#include "loadcast/training.hpp"

using namespace loadcast;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

double sig(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// One LSTM step evaluated unit by unit with explicit loops over [h, x].
void lstm_oracle(const LstmLayer& layer, std::vector<double>& h, std::vector<double>& c, const std::vector<double>& x) {
    const int u = layer.units();
    std::vector<double> z(h);
    z.insert(z.end(), x.begin(), x.end());
    std::vector<double> hn(u), cn(u);
    for (int j = 0; j < u; ++j) {
        double g[4];
        for (int k = 0; k < 4; ++k) {
            g[k] = layer.bias(k * u + j);
            for (std::size_t r = 0; r < z.size(); ++r) g[k] += layer.weights(static_cast<Eigen::Index>(r), k * u + j) * z[r];
        }
        const double f = sig(g[0]), in = sig(g[1]), o = sig(g[2]), cand = std::tanh(g[3]);
        cn[j] = f * c[j] + in * cand;
        hn[j] = o * std::tanh(cn[j]);
    }
    h = hn;
    c = cn;
}

MatrixXd random_matrix(Rng& rng, Eigen::Index r, Eigen::Index c, double lo = -1, double hi = 1) {
    MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng.uniform(lo, hi);
    return m;
}

NetworkConfig ffnn(int layers, int neurons, int inputs = 10) {
    NetworkConfig c;
    c.kind = NetworkKind::Ffnn;
    c.hidden_layers = layers;
    c.neurons = neurons;
    c.inputs = inputs;
    return c;
}

NetworkConfig lstm(int layers, int neurons, int lookback, int inputs = 10) {
    NetworkConfig c = ffnn(layers, neurons, inputs);
    c.kind = NetworkKind::Lstm;
    c.lookback = lookback;
    return c;
}

} // namespace

TEST_CASE("dense layer") {
    DenseLayer id(2, 2, Activation::Linear);
    id.weights = MatrixXd::Identity(2, 2);
    VectorXd x(2);
    x << 3, -4;
    CHECK(dense_forward(id, x) == x);

    DenseLayer relu(1, 1, Activation::Relu);
    relu.weights(0, 0) = 1;
    CHECK(dense_forward(relu, VectorXd::Constant(1, -1.0))(0) == 0.0);
    CHECK(dense_forward(relu, VectorXd::Constant(1, 2.0))(0) == 2.0);

    DenseLayer l(2, 1, Activation::Relu);
    l.weights << 1, 2;
    l.bias << 0.5;
    CHECK(dense_forward(l, VectorXd::Ones(2))(0) == 3.5);
    CHECK_THROWS_AS(dense_forward(l, VectorXd::Ones(3)), ShapeError);
}

TEST_CASE("zero-parameter LSTM halves the cell state") {
    Rng rng(1);
    LstmLayer layer(3, 5);
    for (int k = 0; k < 100; ++k) {
        const VectorXd c0 = random_matrix(rng, 5, 1, -5, 5);
        layer.c = c0;
        layer.h = random_matrix(rng, 5, 1);
        const VectorXd h = lstm_step(layer, random_matrix(rng, 3, 1));
        for (int j = 0; j < 5; ++j) {
            CHECK(std::abs(layer.c(j) - 0.5 * c0(j)) <= 1e-12);
            CHECK(std::abs(h(j) - 0.5 * std::tanh(0.5 * c0(j))) <= 1e-12);
        }
    }
    layer.reset_state();
    CHECK(lstm_step(layer, VectorXd::Zero(3)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("LSTM step matches a scalar evaluation") {
    Rng rng(2);
    LstmLayer layer(3, 2);
    layer.weights = random_matrix(rng, 5, 8);
    layer.bias = random_matrix(rng, 8, 1);
    std::vector<double> h{0.1, -0.2}, c{0.3, 0.05};
    layer.h = Eigen::Map<VectorXd>(h.data(), 2);
    layer.c = Eigen::Map<VectorXd>(c.data(), 2);
    for (int t = 0; t < 10; ++t) {
        std::vector<double> x{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        lstm_step(layer, Eigen::Map<VectorXd>(x.data(), 3));
        lstm_oracle(layer, h, c, x);
        for (int j = 0; j < 2; ++j) {
            CHECK(layer.h(j) == doctest::Approx(h[j]).epsilon(1e-13));
            CHECK(layer.c(j) == doctest::Approx(c[j]).epsilon(1e-13));
        }
    }
}

TEST_CASE("network forward composes its layers") {
    Rng rng(3);
    auto net = Network::initialized(ffnn(3, 8, 4), 5);
    const MatrixXd rows = random_matrix(rng, 20, 4);
    const VectorXd out = net.forward(make_sequences(rows, 1));
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        VectorXd a = rows.row(i).transpose();
        for (const auto& l : net.dense_layers()) a = dense_forward(l, a);
        CHECK(out(i) == doctest::Approx(a(0)).epsilon(1e-13));
    }
    std::vector<Eigen::Index> perm(20);
    for (int i = 0; i < 20; ++i) perm[i] = (i * 7) % 20;
    const VectorXd permuted = net.forward(make_sequences(rows(perm, Eigen::all), 1));
    for (int i = 0; i < 20; ++i) CHECK(permuted(i) == out(perm[i]));

    auto rnn = Network::initialized(lstm(2, 8, 4, 4), 6);
    const VectorXd pred = rnn.predict(rows);
    REQUIRE(pred.size() == 17);
    for (Eigen::Index s = 0; s < pred.size(); ++s) {
        auto layers = rnn.lstm_layers();
        for (auto& l : layers) l.reset_state();
        VectorXd top;
        for (int t = 0; t < 4; ++t) {
            VectorXd a = rows.row(s + t).transpose();
            for (auto& l : layers) a = lstm_step(l, a);
            top = a;
        }
        CHECK(pred(s) == doctest::Approx(dense_forward(rnn.dense_layers().back(), top)(0)).epsilon(1e-13));
    }
    CHECK_THROWS_AS(rnn.predict(rows.topRows(3)), ShapeError);
}

TEST_CASE("initialization is deterministic and parameters round-trip") {
    auto a = Network::initialized(lstm(2, 8, 6), 9);
    auto b = Network::initialized(lstm(2, 8, 6), 9);
    CHECK(a.parameters() == b.parameters());
    CHECK(a.parameters() != Network::initialized(lstm(2, 8, 6), 10).parameters());
    CHECK(a.lstm_layers()[0].bias.segment(0, 8) == VectorXd::Ones(8));
    CHECK(a.parameter_count() == static_cast<std::size_t>(a.parameters().size()));
    auto p = a.parameters();
    p(3) += 1;
    b.set_parameters(p);
    CHECK(b.parameters() == p);
    CHECK_THROWS_AS(b.set_parameters(VectorXd::Zero(3)), ShapeError);
}

TEST_CASE("network config validation") {
    CHECK_THROWS_AS(Network(ffnn(0, 8)), ConfigError);
    CHECK_THROWS_AS(Network(ffnn(9, 8)), ConfigError);
    CHECK_THROWS_AS(Network(ffnn(2, 0)), ConfigError);
    CHECK_THROWS_AS(Network(lstm(1, 8, 0)), ConfigError);
    CHECK(ffnn(4, 8).label() == "ffnn-4x8");
}

TEST_CASE("gradient check") {
    Rng rng(4);
    {
        auto net = Network::initialized(ffnn(2, 8), 1);
        auto batch = make_sequences(random_matrix(rng, 16, 10), 1);
        auto r = gradient_check(net, batch, random_matrix(rng, 16, 1));
        CHECK(r.max_relative_error < 1e-4);
        CHECK(r.parameters == net.parameter_count());
    }
    {
        auto net = Network::initialized(lstm(1, 8, 4), 2);
        auto batch = make_sequences(random_matrix(rng, 12, 10), 4);
        auto r = gradient_check(net, batch, random_matrix(rng, 9, 1));
        CHECK(r.max_relative_error < 1e-4);
    }
    {
        // Targets equal to the predictions: the loss sits at a minimum and every gradient is zero.
        auto net = Network::initialized(ffnn(1, 8, 3), 3);
        auto batch = make_sequences(random_matrix(rng, 5, 3), 1);
        auto r = gradient_check(net, batch, net.forward(batch));
        CHECK(r.max_relative_error < 1e-9);
    }
}

TEST_CASE("training learns a linear map and is reproducible") {
    Rng rng(5);
    const MatrixXd x = random_matrix(rng, 200, 3, 0, 1);
    VectorXd y(200);
    for (Eigen::Index i = 0; i < 200; ++i) y(i) = 0.2 + 0.3 * x(i, 0) - 0.1 * x(i, 1) + 0.4 * x(i, 2);
    auto cfg = ffnn(1, 8, 3);
    cfg.hidden_activation = Activation::Linear;
    TrainConfig tc;
    tc.max_epochs = 10000;
    tc.patience = 500;
    tc.adam.learning_rate = 3e-3;
    auto batch = make_sequences(x, 1);

    auto run = [&] {
        auto net = Network::initialized(cfg, 11);
        AdamState adam;
        auto res = fit(net, adam, batch, y, tc);
        return std::make_pair(net.parameters(), res);
    };
    auto [p1, r1] = run();
    auto [p2, r2] = run();
    CHECK(p1 == p2);
    CHECK(r1.loss_history == r2.loss_history);
    CHECK(r1.best_loss < 1e-3);
    CHECK(r1.best_loss == *std::min_element(r1.loss_history.begin(), r1.loss_history.end()));
}

TEST_CASE("early stopping restores the best snapshot") {
    Rng rng(6);
    const MatrixXd x = random_matrix(rng, 50, 4);
    const VectorXd y = random_matrix(rng, 50, 1);
    auto net = Network::initialized(ffnn(2, 8, 4), 1);
    TrainConfig tc;
    tc.max_epochs = 5000;
    tc.patience = 5;
    tc.adam.learning_rate = 0.5;
    AdamState adam;
    auto batch = make_sequences(x, 1);
    auto res = fit(net, adam, batch, y, tc);
    CHECK(res.stopped_early);
    CHECK(res.epochs_run < tc.max_epochs);
    CHECK(res.epochs_run - 1 - res.best_epoch == tc.patience);
    CHECK(net.loss_and_gradient(batch, y, LossKind::Mae, nullptr) == doctest::Approx(res.best_loss).epsilon(1e-12));

    VectorXd bad = y;
    bad(0) = std::nan("");
    AdamState fresh;
    CHECK_THROWS_AS(fit(net, fresh, batch, bad, tc), TrainingDivergedError);
    TrainConfig broken;
    broken.patience = 0;
    CHECK_THROWS_AS(broken.validate(), ConfigError);
}

TEST_CASE("mini-batches are deterministic per shuffle seed") {
    Rng rng(8);
    const MatrixXd x = random_matrix(rng, 64, 4);
    const VectorXd y = random_matrix(rng, 64, 1);
    TrainConfig tc;
    tc.max_epochs = 20;
    tc.patience = 20;
    tc.batch_size = 16;
    auto go = [&](std::uint64_t seed) {
        auto net = Network::initialized(ffnn(2, 8, 4), 1);
        AdamState adam;
        fit(net, adam, make_sequences(x, 1), y, tc, seed);
        return net.parameters();
    };
    CHECK(go(1) == go(1));
    CHECK(go(1) != go(2));
}

TEST_CASE("adam update") {
    VectorXd p = VectorXd::Zero(2);
    VectorXd g(2);
    g << 1, -2;
    AdamState s;
    s.reset(2);
    adam_update(p, g, s, AdamConfig{});
    // The first bias-corrected step moves each parameter by the learning rate against the gradient sign.
    CHECK(p(0) == doctest::Approx(-1e-3).epsilon(1e-6));
    CHECK(p(1) == doctest::Approx(1e-3).epsilon(1e-6));
    CHECK(s.steps == 1);
}

TEST_CASE("model snapshot round trip") {
    Rng rng(9);
    TrainedModel m(lstm(1, 8, 3, 4));
    m.network = Network::initialized(m.network.config(), 4);
    m.x_scaler = fit_scaler(random_matrix(rng, 10, 4));
    m.y_scaler = fit_scaler(random_matrix(rng, 10, 1));
    m.adam.reset(m.network.parameter_count());
    m.adam.m.setConstant(0.1 / 3.0);
    m.adam.steps = 7;
    m.seed = 4;
    m.fits = 2;
    m.last_fit.loss_history = {0.5, 1.0 / 3.0};
    std::stringstream ss;
    save_model(ss, m);
    const auto back = load_model(ss);
    CHECK(back.network.parameters() == m.network.parameters());
    CHECK(back.network.config() == m.network.config());
    CHECK(back.x_scaler.min == m.x_scaler.min);
    CHECK(back.adam.m == m.adam.m);
    CHECK(back.adam.steps == 7);
    CHECK(back.fits == 2);
    CHECK(back.last_fit.loss_history == m.last_fit.loss_history);
    const MatrixXd rows = random_matrix(rng, 6, 4);
    CHECK(back.network.predict(rows) == m.network.predict(rows));

    std::stringstream bad("{\"format\": \"something-else\"}");
    CHECK_THROWS_AS(load_model(bad), DataError);
    std::stringstream garbage("not json");
    CHECK_THROWS_AS(load_model(garbage), DataError);
}
