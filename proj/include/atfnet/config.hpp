#pragma once

#include <atfnet/nn/layers.hpp>
#include <atfnet/weighting.hpp>

#include <json.hpp>

#include <string>

namespace atfnet {

using Eigen::Index;
using nlohmann::json;

/// How the half spectrum becomes attention tokens.
///   Bins: every frequency bin is one token with a single complex feature.
///   FullSpectrum: the whole spectrum is one token with L-hat features.
enum class Tokenization { Bins, FullSpectrum };

struct FBlockConfig {
    Index lookback = 96;
    Index horizon = 24;
    Index model_dim = 16;
    Index head_dim = 8;
    Index heads = 2;
    Index layers = 2;
    Index ffn_dim = 32;
    Tokenization tokenization = Tokenization::Bins;
    nn::AttentionScale attention_scale = nn::AttentionScale::None;
    bool conjugate_keys = false;

    Index spectrum_len() const { return (lookback + horizon) / 2 + 1; }
    nn::EncoderLayerConfig encoder() const;
    void validate() const;
};

struct TBlockConfig {
    Index lookback = 96;
    Index horizon = 24;
    Index patch_len = 16;
    Index stride = 8;
    Index model_dim = 64;
    Index heads = 4;
    Index layers = 2;
    Index ffn_dim = 128;

    Index num_patches() const { return (lookback - patch_len) / stride + 1; }
    nn::EncoderLayerConfig encoder() const;
    void validate() const;
};

struct WeightingConfig {
    HarmonicSelection harmonics = default_harmonics();
};

struct AtfnetConfig {
    Index lookback = 96;
    Index horizon = 24;
    FBlockConfig fblock;
    TBlockConfig tblock;
    WeightingConfig weighting;

    /// Copies lookback/horizon into both block configs.
    AtfnetConfig& sync();
    void validate() const;
};

bool operator==(const AtfnetConfig& a, const AtfnetConfig& b);

json to_json(const AtfnetConfig& config);
/// Missing keys keep their defaults; lookback/horizon are shared by both blocks.
AtfnetConfig config_from_json(const json& j);
/// Sorted keys, no insignificant whitespace.
std::string canonical_json(const json& j);

} // namespace atfnet
