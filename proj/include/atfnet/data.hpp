#pragma once

#include <atfnet/weighting.hpp>

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace atfnet {

using Eigen::Index;

/// Chronological train/val/test fractions. The train slice holds
/// floor(train*n) rows, val floor(val*n), test the remainder.
struct SplitFractions {
    double train = 0.7;
    double val = 0.1;
    double test = 0.2;

    void validate() const;
};

enum class SplitPart { Train, Val, Test };

SplitPart parse_split_part(const std::string& name);
std::string to_string(SplitPart part);

struct NormStats {
    double mean = 0.0;
    double std = 1.0;
};

/// A multivariate series laid out [time, channels]. `values` is z-scored with
/// per-channel statistics of the train slice; `raw` keeps the file values.
struct Dataset {
    std::vector<std::string> channel_names;
    Eigen::MatrixXd raw;
    Eigen::MatrixXd values;
    SplitFractions split;
    std::vector<NormStats> norm_stats;
    Index train_end = 0;
    Index val_end = 0;

    Index rows() const { return values.rows(); }
    Index channels() const { return values.cols(); }
    /// Half-open row range [first, second) of a split part.
    std::pair<Index, Index> range(SplitPart part) const;
};

/// Smallest per-channel train-slice std accepted.
inline constexpr double kMinChannelStd = 1e-8;

/// Splits, computes train-slice statistics and z-scores. Throws TooShort when
/// the train slice has fewer than 2 rows or the series fewer than `min_rows`,
/// ConstantChannel when a train-slice std falls below kMinChannelStd.
Dataset make_dataset(Eigen::MatrixXd raw, std::vector<std::string> channel_names, SplitFractions split = {},
                     Index min_rows = 2);

/// Header row, then one row per time step: a timestamp (ignored) followed by
/// one numeric column per channel. Non-numeric or non-finite cells throw
/// ParseError naming the 1-based file line and column.
Dataset load_csv(const std::filesystem::path& path, SplitFractions split = {}, Index min_rows = 2);

/// Writes the ISO-8601 hourly timestamp column starting 2000-01-01T00:00:00,
/// then the channels at full double precision.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& channel_names,
               const Eigen::MatrixXd& values);

/// "YYYY-MM-DDTHH:MM:SS" for `hour` hours after 2000-01-01T00:00:00.
std::string iso_timestamp(Index hour);

struct SeriesWindow {
    Index channel = 0;
    Eigen::VectorXd lookback;
    Eigen::VectorXd target;
    /// Row of lookback[0] in the dataset.
    Index origin = 0;
};

/// Windows fitting a part of `part_len` rows at the given stride.
Index window_count(Index part_len, Index lookback, Index horizon, Index stride = 1);

/// Every window lying wholly inside `part`, channel-major then by origin.
std::vector<SeriesWindow> windows(const Dataset& data, Index lookback, Index horizon, SplitPart part,
                                  Index stride = 1);

/// amplitude * sin(2 pi n / period + phase) + N(0, noise_sigma^2).
Eigen::VectorXd synth_tone(Index length, double period, double amplitude = 1.0, double phase = 0.0,
                           double noise_sigma = 0.0, std::uint64_t seed = 0);

Eigen::VectorXd synth_noise(Index length, double sigma, std::uint64_t seed);

/// Periodic part: sum of cosine/sine pairs at harmonics m = 1..ceil(period/2)-1
/// of the period with Gaussian coefficients (zero mean over each period).
/// Residual: centred Gaussian noise rescaled so that E_p / E_r == lambda.
/// Throws InvalidInput for lambda <= 0, period < 3 or repetitions < 1.
PeriodicDecomposition synth_decomposition(Index period, Index repetitions, double lambda, std::uint64_t seed);

} // namespace atfnet
