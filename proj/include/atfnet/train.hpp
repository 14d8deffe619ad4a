#pragma once

#include <atfnet/data.hpp>
#include <atfnet/model.hpp>
#include <atfnet/nn/adam.hpp>

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace atfnet {

struct TrainConfig {
    double lr = 1e-4;
    Index batch_size = 32;
    Index max_epochs = 10;
    Index patience = 3;
    std::uint64_t seed = 0;
    bool shuffle = true;

    void validate() const;
};

struct EpochRecord {
    Index epoch = 0;
    /// Mean pre-step batch loss over the epoch, weighted by batch size.
    double train_mse = 0.0;
    double val_mse = 0.0;
};

struct TrainHistory {
    std::vector<EpochRecord> epochs;
    /// 1-based epoch whose weights the model holds after training.
    Index best_epoch = 0;
    double best_val_mse = 0.0;
    bool stopped_early = false;
};

/// Stop once `patience` consecutive epochs fail to beat the best score.
class EarlyStopping {
public:
    explicit EarlyStopping(Index patience);

    /// Feeds one epoch's score; returns true when it is a new best.
    bool update(double score);
    bool should_stop() const { return since_best_ >= patience_; }
    Index best_epoch() const { return best_epoch_; }
    double best_score() const { return best_; }

private:
    Index patience_;
    Index epoch_ = 0;
    Index best_epoch_ = 0;
    Index since_best_ = 0;
    double best_;
};

double mse(const Eigen::VectorXd& prediction, const Eigen::VectorXd& target);
double mae(const Eigen::VectorXd& prediction, const Eigen::VectorXd& target);

/// Adam on the MSE of the blended forecast, one shuffled pass per epoch,
/// validation after each epoch. The model ends holding the best-validation
/// weights. Throws NonFiniteLoss naming the epoch and batch.
TrainHistory train(Atfnet& model, const std::vector<SeriesWindow>& train_windows,
                   const std::vector<SeriesWindow>& val_windows, const TrainConfig& config);

/// Stride-1 train and val windows of `data` at the model's lookback/horizon.
TrainHistory train(Atfnet& model, const Dataset& data, const TrainConfig& config);

std::string history_csv(const TrainHistory& history);

struct EvalReport {
    double mse = 0.0;
    double mae = 0.0;
    Index n_windows = 0;
    Eigen::VectorXd per_horizon_mse;
};

/// Throws EmptySplit when there are no windows. Windows may be spread over
/// ATFNET_THREADS workers; the reduction order is fixed.
EvalReport evaluate(const Atfnet& model, const std::vector<SeriesWindow>& windows);
EvalReport evaluate(const Atfnet& model, const Dataset& data, SplitPart part);

nlohmann::json to_json(const EvalReport& report);

} // namespace atfnet
