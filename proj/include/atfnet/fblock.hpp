#pragma once

#include <atfnet/config.hpp>
#include <atfnet/nn/layers.hpp>

#include <string>
#include <vector>

namespace atfnet {

/// Frequency-domain branch:
/// extended DFT -> frequency RevIN -> complex embedding -> M complex encoder
/// layers -> projection back to L-hat bins -> RevIN inverse -> mirror to the
/// full spectrum -> iDFT -> last T samples.
class FBlock {
public:
    FBlock() = default;
    FBlock(const FBlockConfig& config, nn::ParamStore& store, const std::string& prefix = "fblock");

    /// x is lookback x 1; returns horizon x 1.
    ad::Var forward(ad::Tape& tape, const nn::ParamStore& store, const ad::Var& x) const;

    const FBlockConfig& config() const { return config_; }

    /// Closed-form count of real scalars registered by a block with this config.
    static Index param_count(const FBlockConfig& config);

private:
    ad::CVar extended_dft(ad::Tape& tape, const ad::Var& x) const;
    ad::Var forecast_tail(ad::Tape& tape, const ad::CVar& half) const;

    FBlockConfig config_;
    nn::ComplexLinear embed_;
    std::vector<nn::ComplexEncoderLayer> layers_;
    nn::ComplexLinear project_;

    // Real and imaginary parts of the extended DFT basis, [L-hat x L].
    ad::Matrix dft_re_;
    ad::Matrix dft_im_;
    // Linear map from (Re, Im) of the half spectrum to the forecast samples, [T x L-hat].
    ad::Matrix tail_re_;
    ad::Matrix tail_im_;
};

} // namespace atfnet
