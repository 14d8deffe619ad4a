#pragma once

#include <atfnet/config.hpp>
#include <atfnet/fblock.hpp>
#include <atfnet/tblock.hpp>
#include <atfnet/weighting.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace atfnet {

struct Forecast {
    Eigen::VectorXd y_hat;
    Eigen::VectorXd y_f;
    Eigen::VectorXd y_t;
    EnergyWeights weights;
};

struct GraphForecast {
    ad::Var y_hat;
    ad::Var y_f;
    ad::Var y_t;
    EnergyWeights weights;
};

/// y_hat = w_t * y_t + w_f * y_f, with (w_f, w_t) from the harmonic energy of
/// the input window. The weights are constants to the optimiser.
///
/// Parameters live in one store: every F-block tensor first, then the T-block.
class Atfnet {
public:
    /// All parameters zero; see init_params for a trainable start.
    explicit Atfnet(const AtfnetConfig& config);

    const AtfnetConfig& config() const { return config_; }
    nn::ParamStore& params() { return params_; }
    const nn::ParamStore& params() const { return params_; }
    const FBlock& fblock() const { return fblock_; }
    const TBlock& tblock() const { return tblock_; }

    EnergyWeights weights_for(const Eigen::VectorXd& x) const;

    /// Records the forward pass of one univariate window.
    GraphForecast forward(ad::Tape& tape, const Eigen::VectorXd& x) const;
    /// Same with an explicit weighting instead of the harmonic detection.
    GraphForecast forward(ad::Tape& tape, const Eigen::VectorXd& x, const EnergyWeights& weights) const;
    /// x may be any graph node of shape lookback x 1.
    GraphForecast forward(ad::Tape& tape, const ad::Var& x, const EnergyWeights& weights) const;

    Forecast predict(const Eigen::VectorXd& x) const;

private:
    AtfnetConfig config_;
    nn::ParamStore params_;
    FBlock fblock_;
    TBlock tblock_;
};

/// Weights uniform in +-1/sqrt(fan_in) (fan_in counts both planes of complex
/// inputs), biases zero, positional tables uniform in +-0.02.
Atfnet init_params(const AtfnetConfig& config, std::uint64_t seed);

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// "ATFN" | u32 version | u32 n | n bytes of canonical config JSON | u32 tensors |
/// per tensor: u32 name length, name, u32 rank, u32 dims..., float64 data.
/// Integers and floats little-endian, data row-major.
std::string checkpoint_bytes(const Atfnet& model);
Atfnet checkpoint_from_bytes(std::string_view bytes);

void save_checkpoint(const Atfnet& model, const std::filesystem::path& path);
Atfnet load_checkpoint(const std::filesystem::path& path);
/// Throws ConfigMismatch when the stored configuration differs from `expected`.
Atfnet load_checkpoint(const std::filesystem::path& path, const AtfnetConfig& expected);

} // namespace atfnet
