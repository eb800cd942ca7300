#pragma once

#include <memory>
#include <optional>
#include <string>

#include "loadcast/forecaster.hpp"
#include "loadcast/model_io.hpp"
#include "loadcast/pslp.hpp"
#include "loadcast/slp.hpp"

namespace loadcast {

/// Fixed profile scaled to an annual consumption. Without a configured value the annual
/// consumption is estimated once, from the load measured before the first forecast.
class SlpForecaster final : public Forecaster {
public:
    explicit SlpForecaster(SlpProfileSet profiles, std::optional<double> annual_kwh = std::nullopt);

    std::string name() const override { return "slp"; }
    ForecasterKind kind() const override { return ForecasterKind::Slp; }
    void update(const StepView& view, std::vector<RefitRecord>& log) override;
    std::vector<double> forecast(const StepView& view, std::size_t steps) override;

    std::optional<double> annual_kwh() const { return annual_kwh_; }

private:
    SlpProfileSet profiles_;
    std::optional<double> annual_kwh_;
};

/// Learned profiles. The first update folds in all load measured so far; later refits run
/// once a day at `refit_second_of_day`.
class PslpForecaster final : public Forecaster {
public:
    explicit PslpForecaster(std::int64_t refit_second_of_day = 12 * kSecondsPerHour);

    std::string name() const override { return "pslp"; }
    ForecasterKind kind() const override { return ForecasterKind::Pslp; }
    void update(const StepView& view, std::vector<RefitRecord>& log) override;
    bool fitted() const override { return state_.last_refit.has_value(); }
    std::vector<double> forecast(const StepView& view, std::size_t steps) override;

    const PslpState& state() const { return state_; }
    std::size_t last_fallback_steps() const { return last_fallback_steps_; }

private:
    std::int64_t refit_second_of_day_;
    PslpState state_;
    std::size_t last_fallback_steps_ = 0;
};

/// Repeats the load measured seven days earlier (the MASE reference forecast).
class PersistenceForecaster final : public Forecaster {
public:
    std::string name() const override { return "naive7d"; }
    ForecasterKind kind() const override { return ForecasterKind::Reference; }
    void update(const StepView&, std::vector<RefitRecord>&) override {}
    std::vector<double> forecast(const StepView& view, std::size_t steps) override;
};

struct NeuralSettings {
    NetworkConfig network;
    TrainConfig train;
    std::int64_t refit_seconds = kSecondsPerDay;  ///< refit when now is a multiple of this
    std::size_t min_samples = 288;                ///< training targets needed before the first fit
    std::uint64_t seed = 42;
};

/// FFNN or LSTM regressor on the feature rows. Trains once when enough window data exists,
/// then refits on the current window (warm start) at every cadence instant. The scalers are
/// refitted on the training rows before each fit and cached for forecasting.
class NeuralForecaster final : public Forecaster {
public:
    explicit NeuralForecaster(NeuralSettings settings);

    std::string name() const override { return settings_.network.label(); }
    ForecasterKind kind() const override { return ForecasterKind::Neural; }
    void update(const StepView& view, std::vector<RefitRecord>& log) override;
    bool fitted() const override { return model_ && model_->fits > 0; }
    /// Without a fit (forced forecasting) an untrained network is used, with scalers taken
    /// from the forecast rows and the load history.
    std::vector<double> forecast(const StepView& view, std::size_t steps) override;

    const NeuralSettings& settings() const { return settings_; }
    const TrainedModel* model() const { return model_.get(); }
    /// Wall-clock seconds spent in fits so far. Informational only; never part of run output.
    double training_seconds() const { return training_seconds_; }

private:
    NeuralSettings settings_;
    std::unique_ptr<TrainedModel> model_;
    double training_seconds_ = 0.0;
};

} // namespace loadcast
