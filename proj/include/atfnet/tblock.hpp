#pragma once

#include <atfnet/config.hpp>
#include <atfnet/nn/layers.hpp>

#include <string>
#include <vector>

namespace atfnet {

/// Rows j = x[j*stride .. j*stride+patch-1]; the uncovered tail is dropped.
/// Throws PatchTooLong when patch > x.size().
Eigen::MatrixXd make_patches(const Eigen::VectorXd& x, Index patch, Index stride);

/// Time-domain branch: RevIN -> patches -> linear patch embedding plus a
/// learnable positional table -> real encoder -> flatten -> linear head -> RevIN inverse.
class TBlock {
public:
    TBlock() = default;
    TBlock(const TBlockConfig& config, nn::ParamStore& store, const std::string& prefix = "tblock");

    /// x is lookback x 1; returns horizon x 1.
    ad::Var forward(ad::Tape& tape, const nn::ParamStore& store, const ad::Var& x) const;

    const TBlockConfig& config() const { return config_; }

    static Index param_count(const TBlockConfig& config);

private:
    TBlockConfig config_;
    nn::Linear embed_;
    std::size_t position_ = 0;
    std::vector<nn::EncoderLayer> layers_;
    nn::Linear head_;
};

} // namespace atfnet
