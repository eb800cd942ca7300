#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "loadcast/network.hpp"

namespace loadcast {

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct TrainConfig {
    LossKind loss = LossKind::Mae;
    int max_epochs = 2000;
    int patience = 50;
    AdamConfig adam;
    std::size_t batch_size = 0;  ///< 0 = full batch
    std::uint64_t seed = 42;
    double min_delta = 0.0;      ///< improvement needed to reset the patience counter

    /// Throws ConfigError unless epochs and patience are positive and the ADAM constants are sane.
    void validate() const;
};

/// First and second moment estimates. Kept across refits so a warm start continues the
/// same optimizer trajectory.
struct AdamState {
    Eigen::VectorXd m;
    Eigen::VectorXd v;
    std::int64_t steps = 0;

    void reset(std::size_t parameters);
    bool matches(std::size_t parameters) const { return static_cast<std::size_t>(m.size()) == parameters; }
};

void adam_update(Eigen::VectorXd& params, const Eigen::VectorXd& grad, AdamState& state, const AdamConfig& cfg);

struct FitResult {
    std::vector<double> loss_history;  ///< monitored loss at the start of every epoch
    int best_epoch = 0;
    double best_loss = 0.0;
    int epochs_run = 0;
    bool stopped_early = false;
};

/// Minimises the configured loss with ADAM, starting from the network's current parameters
/// and the given optimizer state. Every epoch first records the full training loss, keeps a
/// snapshot when it is the best so far, and stops once `patience` epochs pass without
/// improvement. The best snapshot is restored before returning. `shuffle_seed` drives the
/// mini-batch order when batch_size > 0. Throws TrainingDivergedError on a non-finite loss.
FitResult fit(Network& network, AdamState& adam, const SequenceBatch& batch, const Eigen::VectorXd& targets,
              const TrainConfig& config, std::uint64_t shuffle_seed = 0);

struct GradientCheckResult {
    double max_relative_error = 0.0;
    std::size_t worst_parameter = 0;
    std::size_t parameters = 0;
};

/// Compares the analytic squared-error gradient with central finite differences. The
/// per-parameter error is |ga - gn| / max(1, |ga|, |gn|).
GradientCheckResult gradient_check(const Network& network, const SequenceBatch& batch,
                                   const Eigen::VectorXd& targets, double h = 1e-5);

} // namespace loadcast
