#include "loadcast/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "loadcast/errors.hpp"
#include "loadcast/random.hpp"

namespace loadcast {

void TrainConfig::validate() const {
    if (max_epochs < 1) throw ConfigError(fmt::format("max_epochs must be positive, got {}", max_epochs));
    if (patience < 1) throw ConfigError(fmt::format("patience must be positive, got {}", patience));
    if (!(adam.learning_rate > 0.0)) throw ConfigError("adam learning rate must be positive");
    if (adam.beta1 < 0.0 || adam.beta1 >= 1.0 || adam.beta2 < 0.0 || adam.beta2 >= 1.0)
        throw ConfigError("adam betas must lie in [0, 1)");
    if (!(adam.epsilon > 0.0)) throw ConfigError("adam epsilon must be positive");
    if (min_delta < 0.0) throw ConfigError("min_delta must be non-negative");
}

void AdamState::reset(std::size_t parameters) {
    m = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(parameters));
    v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(parameters));
    steps = 0;
}

void adam_update(Eigen::VectorXd& params, const Eigen::VectorXd& grad, AdamState& state, const AdamConfig& cfg) {
    if (!state.matches(static_cast<std::size_t>(params.size()))) state.reset(static_cast<std::size_t>(params.size()));
    ++state.steps;
    state.m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * grad;
    state.v = cfg.beta2 * state.v + (1.0 - cfg.beta2) * grad.cwiseAbs2();
    const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.steps));
    const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.steps));
    params.array() -= cfg.learning_rate * (state.m.array() / c1) / ((state.v.array() / c2).sqrt() + cfg.epsilon);
}

FitResult fit(Network& network, AdamState& adam, const SequenceBatch& batch, const Eigen::VectorXd& targets,
              const TrainConfig& config, std::uint64_t shuffle_seed) {
    config.validate();
    const auto n = batch.samples();
    if (n < 1) throw ShapeError("fit: empty training batch");
    if (targets.size() != n) throw ShapeError("fit: target count does not match batch");

    Eigen::VectorXd params = network.parameters();
    if (!adam.matches(static_cast<std::size_t>(params.size()))) adam.reset(static_cast<std::size_t>(params.size()));

    const bool full = config.batch_size == 0 || config.batch_size >= static_cast<std::size_t>(n);
    Rng rng(shuffle_seed);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});

    FitResult result;
    Eigen::VectorXd best = params;
    Eigen::VectorXd grad;
    for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
        const double loss = network.loss_and_gradient(batch, targets, config.loss, full ? &grad : nullptr);
        if (!std::isfinite(loss))
            throw TrainingDivergedError(fmt::format("training loss became non-finite at epoch {}", epoch), epoch);
        result.loss_history.push_back(loss);
        result.epochs_run = epoch + 1;
        if (epoch == 0 || loss < result.best_loss - config.min_delta) {
            result.best_loss = loss;
            result.best_epoch = epoch;
            best = params;
        }
        if (epoch - result.best_epoch >= config.patience) {
            result.stopped_early = true;
            break;
        }
        if (full) {
            adam_update(params, grad, adam, config.adam);
            network.set_parameters(params);
            continue;
        }
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
        for (std::size_t at = 0; at < order.size(); at += config.batch_size) {
            const std::size_t stop = std::min(order.size(), at + config.batch_size);
            std::vector<Eigen::Index> rows(order.begin() + static_cast<std::ptrdiff_t>(at),
                                           order.begin() + static_cast<std::ptrdiff_t>(stop));
            network.loss_and_gradient(batch.subset(rows), targets(rows), config.loss, &grad);
            adam_update(params, grad, adam, config.adam);
            network.set_parameters(params);
        }
    }
    network.set_parameters(best);
    return result;
}

GradientCheckResult gradient_check(const Network& network, const SequenceBatch& batch,
                                   const Eigen::VectorXd& targets, double h) {
    Eigen::VectorXd analytic;
    network.loss_and_gradient(batch, targets, LossKind::Mse, &analytic);
    Network probe = network;
    const Eigen::VectorXd base = network.parameters();
    GradientCheckResult result;
    result.parameters = static_cast<std::size_t>(base.size());
    Eigen::VectorXd shifted = base;
    for (Eigen::Index k = 0; k < base.size(); ++k) {
        shifted(k) = base(k) + h;
        probe.set_parameters(shifted);
        const double up = probe.loss_and_gradient(batch, targets, LossKind::Mse, nullptr);
        shifted(k) = base(k) - h;
        probe.set_parameters(shifted);
        const double down = probe.loss_and_gradient(batch, targets, LossKind::Mse, nullptr);
        shifted(k) = base(k);
        const double numeric = (up - down) / (2.0 * h);
        const double ga = analytic(k);
        const double err = std::abs(ga - numeric) / std::max({1.0, std::abs(ga), std::abs(numeric)});
        if (err > result.max_relative_error) {
            result.max_relative_error = err;
            result.worst_parameter = static_cast<std::size_t>(k);
        }
    }
    return result;
}

} // namespace loadcast
