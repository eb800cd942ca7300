#include "loadcast/forecasters.hpp"

#include <algorithm>
#include <chrono>

#include <fmt/format.h>

#include "loadcast/errors.hpp"

namespace loadcast {

StepView::StepView(const Dataset& data, const FeatureMatrix& features, Timestamp now, std::int64_t window_seconds,
                   std::size_t horizon)
    : data_(data), features_(features), now_(now), window_start_(std::max(now - window_seconds, data.load.start)),
      horizon_(horizon) {
    const auto& load = data.load;
    std::size_t n = 0;
    if (now > load.start)
        n = std::min(load.size(), static_cast<std::size_t>((now - load.start + load.step_seconds - 1) / load.step_seconds));
    history_ = std::span<const double>(load.values.data(), n);
}

LoadSeries StepView::history_series(Timestamp from) const {
    LoadSeries out;
    out.step_seconds = step_seconds();
    const Timestamp start = std::max(from, history_start());
    const auto first = static_cast<std::size_t>((start - history_start() + step_seconds() - 1) / step_seconds());
    out.start = history_start() + static_cast<std::int64_t>(first) * step_seconds();
    if (first < history_.size()) out.values.assign(history_.begin() + static_cast<std::ptrdiff_t>(first), history_.end());
    return out;
}

Eigen::MatrixXd StepView::feature_rows(Timestamp from, Timestamp to) const {
    if (to > now_ + kSecondsPerDay)
        throw ConfigError(fmt::format("feature rows up to {} requested at {}: lags would reach past now", to.iso(),
                                      now_.iso()));
    if (from < features_.start)
        throw ColdStartError(fmt::format("no feature rows before {}", features_.start.iso()), features_.start);
    const auto a = features_.index_of(from);
    const auto rows = static_cast<Eigen::Index>((to - from) / step_seconds());
    if (!a || *a + static_cast<std::size_t>(rows) > features_.rows())
        throw DataError(fmt::format("feature rows [{}, {}) are not available", from.iso(), to.iso()));
    return features_.x.middleRows(static_cast<Eigen::Index>(*a), rows);
}

SlpForecaster::SlpForecaster(SlpProfileSet profiles, std::optional<double> annual_kwh)
    : profiles_(std::move(profiles)), annual_kwh_(annual_kwh) {
    if (annual_kwh_ && !(*annual_kwh_ > 0.0)) throw ConfigError("slp annual consumption must be positive");
}

void SlpForecaster::update(const StepView& view, std::vector<RefitRecord>& log) {
    if (annual_kwh_) return;
    const auto history = view.history();
    if (history.empty())
        throw ColdStartError("slp needs one measurement to estimate the annual consumption",
                             view.history_start() + view.step_seconds());
    LoadSeries observed = view.history_series(view.history_start());
    annual_kwh_ = estimate_annual_kwh(observed);
    log.push_back(RefitRecord{name(), view.now(), "profile", observed.start, observed.time_at(observed.size() - 1),
                              observed.size(), 0, 0.0});
}

std::vector<double> SlpForecaster::forecast(const StepView& view, std::size_t steps) {
    if (!annual_kwh_) throw ColdStartError("slp annual consumption not yet known", view.now());
    return slp_forecast(profiles_, *annual_kwh_, view.now(), steps, view.holidays(), view.step_seconds()).values;
}

PslpForecaster::PslpForecaster(std::int64_t refit_second_of_day) : refit_second_of_day_(refit_second_of_day) {
    if (refit_second_of_day < 0 || refit_second_of_day >= kSecondsPerDay)
        throw ConfigError(fmt::format("pslp refit time must lie within a day, got {} s", refit_second_of_day));
}

void PslpForecaster::update(const StepView& view, std::vector<RefitRecord>& log) {
    if (state_.last_refit && !pslp_refit_due(view.now(), refit_second_of_day_)) return;
    const Timestamp from = state_.last_refit.value_or(view.history_start());
    const LoadSeries fresh = view.history_series(from);
    if (!state_.last_refit && fresh.empty())
        throw ColdStartError("pslp has no measurements yet", view.history_start() + kSecondsPerDay);
    state_ = pslp_refit(std::move(state_), fresh, view.now(), view.holidays());
    RefitRecord rec{name(), view.now(), "profile", fresh.start, fresh.start, fresh.size(), 0, 0.0};
    if (!fresh.empty()) rec.last_sample = fresh.time_at(fresh.size() - 1);
    log.push_back(rec);
}

std::vector<double> PslpForecaster::forecast(const StepView& view, std::size_t steps) {
    auto f = pslp_forecast(state_, view.now(), steps, view.holidays(), view.step_seconds());
    last_fallback_steps_ = f.fallback_steps;
    return std::move(f.series.values);
}

std::vector<double> PersistenceForecaster::forecast(const StepView& view, std::size_t steps) {
    const Timestamp lag = view.now() - kSecondsPerWeek;
    if (lag < view.history_start())
        throw ColdStartError("persistence needs one week of history", view.history_start() + kSecondsPerWeek);
    const auto history = view.history();
    const auto first = static_cast<std::size_t>((lag - view.history_start()) / view.step_seconds());
    if (first + steps > history.size()) throw ConfigError("persistence horizon longer than one week");
    return {history.begin() + static_cast<std::ptrdiff_t>(first),
            history.begin() + static_cast<std::ptrdiff_t>(first + steps)};
}

NeuralForecaster::NeuralForecaster(NeuralSettings settings) : settings_(std::move(settings)) {
    settings_.network.validate();
    settings_.train.validate();
    if (settings_.refit_seconds <= 0) throw ConfigError("neural refit cadence must be positive");
    if (settings_.min_samples < 1) throw ConfigError("neural min_samples must be at least 1");
}

void NeuralForecaster::update(const StepView& view, std::vector<RefitRecord>& log) {
    const std::int64_t step = view.step_seconds();
    const int context = settings_.network.context();
    const Timestamp now = view.now();
    const bool due = !fitted() || now.epoch_seconds() % settings_.refit_seconds == 0;
    if (!due) return;

    const Timestamp earliest = view.features_start() + static_cast<std::int64_t>(context - 1) * step;
    const Timestamp first = std::max(view.window_start(), earliest);
    const std::size_t samples = first < now ? static_cast<std::size_t>((now - first) / step) : 0;
    if (samples < settings_.min_samples) {
        if (fitted()) return;
        throw ColdStartError(fmt::format("{} needs {} training samples, has {}", name(), settings_.min_samples, samples),
                             earliest + static_cast<std::int64_t>(settings_.min_samples) * step);
    }

    const Eigen::MatrixXd rows = view.feature_rows(first - static_cast<std::int64_t>(context - 1) * step, now);
    const auto history = view.history();
    const auto offset = static_cast<std::size_t>((first - view.history_start()) / step);
    Eigen::MatrixXd y(static_cast<Eigen::Index>(samples), 1);
    for (std::size_t k = 0; k < samples; ++k) y(static_cast<Eigen::Index>(k), 0) = history[offset + k];

    const bool fresh = !fitted();
    if (fresh) {
        model_ = std::make_unique<TrainedModel>(settings_.network);
        model_->network = Network::initialized(settings_.network, settings_.seed);
        model_->seed = settings_.seed;
    }
    model_->x_scaler = fit_scaler(rows);
    model_->y_scaler = fit_scaler(y);
    const auto batch = make_sequences(transform(rows, model_->x_scaler), context);
    const Eigen::VectorXd targets = transform(y, model_->y_scaler).col(0);
    const auto started = std::chrono::steady_clock::now();
    model_->last_fit = fit(model_->network, model_->adam, batch, targets, settings_.train,
                           settings_.seed + static_cast<std::uint64_t>(model_->fits));
    training_seconds_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    ++model_->fits;
    log.push_back(RefitRecord{name(), now, fresh ? "train" : "refit", first,
                              first + static_cast<std::int64_t>(samples - 1) * step, samples,
                              model_->last_fit.epochs_run, model_->last_fit.best_loss});
}

std::vector<double> NeuralForecaster::forecast(const StepView& view, std::size_t steps) {
    const std::int64_t step = view.step_seconds();
    const int context = settings_.network.context();
    const Eigen::MatrixXd rows = view.feature_rows(view.now() - static_cast<std::int64_t>(context - 1) * step,
                                                   view.now() + static_cast<std::int64_t>(steps) * step);
    if (!model_) {
        model_ = std::make_unique<TrainedModel>(settings_.network);
        model_->network = Network::initialized(settings_.network, settings_.seed);
        model_->seed = settings_.seed;
        model_->x_scaler = fit_scaler(rows);
        const auto history = view.history();
        Eigen::MatrixXd y(2, 1);
        y << 0.0, history.empty() ? 1.0 : *std::max_element(history.begin(), history.end());
        model_->y_scaler = fit_scaler(y);
    }
    const Eigen::VectorXd scaled = model_->network.predict(transform(rows, model_->x_scaler));
    const Eigen::MatrixXd watts = inverse_transform(scaled, model_->y_scaler);
    return {watts.data(), watts.data() + watts.size()};
}

} // namespace loadcast
