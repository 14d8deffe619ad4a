#include <atfnet/error.hpp>
#include <atfnet/parallel.hpp>
#include <atfnet/train.hpp>

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace atfnet {

void TrainConfig::validate() const
{
    if (!(lr >= 0.0) || !std::isfinite(lr)) {
        throw Error(ErrorCode::InvalidInput, "learning rate must be finite and non-negative");
    }
    if (batch_size < 1 || max_epochs < 1 || patience < 1) {
        throw Error(ErrorCode::InvalidInput, "batch size, epoch limit and patience must be positive");
    }
}

EarlyStopping::EarlyStopping(Index patience) : patience_(patience), best_(std::numeric_limits<double>::infinity())
{
    if (patience < 1) {
        throw Error(ErrorCode::InvalidInput, "patience must be at least 1");
    }
}

bool EarlyStopping::update(double score)
{
    ++epoch_;
    if (score < best_) {
        best_ = score;
        best_epoch_ = epoch_;
        since_best_ = 0;
        return true;
    }
    ++since_best_;
    return false;
}

double mse(const Eigen::VectorXd& prediction, const Eigen::VectorXd& target)
{
    if (prediction.size() != target.size() || prediction.size() == 0) {
        throw Error(ErrorCode::ShapeMismatch, "mse needs equal, non-empty vectors");
    }
    return (prediction - target).squaredNorm() / static_cast<double>(target.size());
}

double mae(const Eigen::VectorXd& prediction, const Eigen::VectorXd& target)
{
    if (prediction.size() != target.size() || prediction.size() == 0) {
        throw Error(ErrorCode::ShapeMismatch, "mae needs equal, non-empty vectors");
    }
    return (prediction - target).cwiseAbs().sum() / static_cast<double>(target.size());
}

TrainHistory train(Atfnet& model, const std::vector<SeriesWindow>& train_windows,
                   const std::vector<SeriesWindow>& val_windows, const TrainConfig& config)
{
    config.validate();
    if (train_windows.empty()) {
        throw Error(ErrorCode::EmptySplit, "no training windows");
    }
    if (val_windows.empty()) {
        throw Error(ErrorCode::EmptySplit, "no validation windows");
    }

    std::vector<EnergyWeights> weights;
    weights.reserve(train_windows.size());
    for (const auto& w : train_windows) {
        weights.push_back(model.weights_for(w.lookback));
    }

    nn::AdamConfig adam_config;
    adam_config.lr = config.lr;
    nn::Adam adam(adam_config);
    Rng rng(config.seed);
    EarlyStopping stopping(config.patience);
    nn::ParamStore best = model.params();
    TrainHistory history;

    std::vector<std::size_t> order(train_windows.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto batch = static_cast<std::size_t>(config.batch_size);

    for (Index epoch = 1; epoch <= config.max_epochs; ++epoch) {
        if (config.shuffle) {
            rng.shuffle(order);
        }
        double loss_sum = 0.0;
        for (std::size_t start = 0, b = 0; start < order.size(); start += batch, ++b) {
            const std::size_t stop = std::min(order.size(), start + batch);
            ad::Tape tape;
            ad::Var total;
            for (std::size_t i = start; i < stop; ++i) {
                const SeriesWindow& w = train_windows[order[i]];
                const GraphForecast out = model.forward(tape, w.lookback, weights[order[i]]);
                const ad::Var err = ad::sum_all(ad::square(ad::sub(out.y_hat, tape.constant(w.target))));
                total = total.valid() ? ad::add(total, err) : err;
            }
            const double elements = static_cast<double>((stop - start) * static_cast<std::size_t>(model.config().horizon));
            const ad::Var loss = ad::scale(total, 1.0 / elements);
            const double value = loss.value()(0, 0);
            if (!std::isfinite(value)) {
                throw Error(ErrorCode::NonFiniteLoss,
                            "epoch " + std::to_string(epoch) + ", batch " + std::to_string(b + 1));
            }
            loss_sum += value * static_cast<double>(stop - start);
            tape.backward(loss);
            model.params().zero_grad();
            model.params().accumulate_grads(tape);
            adam.step(model.params());
        }

        EpochRecord record;
        record.epoch = epoch;
        record.train_mse = loss_sum / static_cast<double>(order.size());
        record.val_mse = evaluate(model, val_windows).mse;
        history.epochs.push_back(record);
        if (stopping.update(record.val_mse)) {
            best = model.params();
        }
        if (stopping.should_stop()) {
            history.stopped_early = true;
            break;
        }
    }

    model.params() = std::move(best);
    history.best_epoch = stopping.best_epoch();
    history.best_val_mse = stopping.best_score();
    return history;
}

TrainHistory train(Atfnet& model, const Dataset& data, const TrainConfig& config)
{
    const Index l = model.config().lookback;
    const Index t = model.config().horizon;
    return train(model, windows(data, l, t, SplitPart::Train), windows(data, l, t, SplitPart::Val), config);
}

std::string history_csv(const TrainHistory& history)
{
    std::ostringstream out;
    out.precision(17);
    out << "epoch,train_mse,val_mse\n";
    for (const auto& e : history.epochs) {
        out << e.epoch << ',' << e.train_mse << ',' << e.val_mse << '\n';
    }
    return out.str();
}

EvalReport evaluate(const Atfnet& model, const std::vector<SeriesWindow>& windows)
{
    if (windows.empty()) {
        throw Error(ErrorCode::EmptySplit, "no windows to evaluate");
    }
    const Index horizon = model.config().horizon;
    std::vector<Eigen::VectorXd> errors(windows.size());
    parallel_for(windows.size(), [&](std::size_t i) {
        errors[i] = model.predict(windows[i].lookback).y_hat - windows[i].target;
    });

    EvalReport report;
    report.n_windows = static_cast<Index>(windows.size());
    report.per_horizon_mse = Eigen::VectorXd::Zero(horizon);
    for (const auto& e : errors) {
        report.per_horizon_mse += e.array().square().matrix();
        report.mae += e.cwiseAbs().sum();
    }
    const double n = static_cast<double>(windows.size());
    report.per_horizon_mse /= n;
    report.mse = report.per_horizon_mse.mean();
    report.mae /= n * static_cast<double>(horizon);
    return report;
}

EvalReport evaluate(const Atfnet& model, const Dataset& data, SplitPart part)
{
    return evaluate(model, windows(data, model.config().lookback, model.config().horizon, part));
}

nlohmann::json to_json(const EvalReport& report)
{
    return {{"mse", report.mse},
            {"mae", report.mae},
            {"n_windows", report.n_windows},
            {"per_horizon_mse", std::vector<double>(report.per_horizon_mse.data(),
                                                    report.per_horizon_mse.data() + report.per_horizon_mse.size())}};
}

} // namespace atfnet
