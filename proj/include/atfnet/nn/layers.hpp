#pragma once

// Layer set of both branches. Each layer registers its tensors in a
// ParamStore at construction and keeps only their indices, so layers are
// cheap value types and the store alone owns the numbers.

#include <atfnet/nn/params.hpp>

#include <string>
#include <vector>

namespace atfnet::nn {

inline constexpr double kNormEpsilon = 1e-5;

enum class AttentionScale { None, InvSqrtD };
enum class Field { Complex, Real };

struct EncoderLayerConfig {
    Index model_dim = 16;
    Index head_dim = 8;
    Index num_heads = 2;
    Index ffn_dim = 32;
    AttentionScale attention_scale = AttentionScale::None;
    bool conjugate_keys = false;
    Field field = Field::Complex;

    void validate() const;
};

// ---------------------------------------------------------------- complex --

class ComplexLinear {
public:
    ComplexLinear() = default;
    ComplexLinear(ParamStore& store, const std::string& prefix, Index in, Index out, bool bias = true);

    /// x [n, in] -> x W + b, [n, out].
    ad::CVar forward(ad::Tape& tape, const ParamStore& store, const ad::CVar& x) const;

    Index in_features() const { return in_; }
    Index out_features() const { return out_; }

private:
    std::size_t weight_ = 0;
    std::size_t bias_ = 0;
    Index in_ = 0;
    Index out_ = 0;
    bool has_bias_ = false;
};

/// Multi-head attention whose logits are the entrywise modulus of Q K^T.
class ComplexSpectrumAttention {
public:
    ComplexSpectrumAttention() = default;
    ComplexSpectrumAttention(ParamStore& store, const std::string& prefix, const EncoderLayerConfig& config);

    ad::CVar forward(ad::Tape& tape, const ParamStore& store, const ad::CVar& tokens,
                     std::vector<ad::Var>* attention = nullptr) const;

private:
    EncoderLayerConfig config_;
    std::size_t query_ = 0;
    std::size_t key_ = 0;
    std::size_t value_ = 0;
    std::size_t output_ = 0;
};

/// Per token: subtract the complex mean, divide by the standard deviation of
/// the centred magnitudes (floored at eps), then complex gain and shift.
class ComplexLayerNorm {
public:
    ComplexLayerNorm() = default;
    ComplexLayerNorm(ParamStore& store, const std::string& prefix, Index dim);

    ad::CVar forward(ad::Tape& tape, const ParamStore& store, const ad::CVar& x) const;

private:
    std::size_t gain_ = 0;
    std::size_t shift_ = 0;
};

/// complex linear -> split ReLU -> complex linear. No residual.
class ComplexFeedForward {
public:
    ComplexFeedForward() = default;
    ComplexFeedForward(ParamStore& store, const std::string& prefix, Index dim, Index hidden);

    ad::CVar forward(ad::Tape& tape, const ParamStore& store, const ad::CVar& x) const;

private:
    ComplexLinear expand_;
    ComplexLinear contract_;
};

/// Post-norm encoder layer: x = LN(x + CSA(x)); x = LN(x + FFN(x)).
class ComplexEncoderLayer {
public:
    ComplexEncoderLayer() = default;
    ComplexEncoderLayer(ParamStore& store, const std::string& prefix, const EncoderLayerConfig& config);

    ad::CVar forward(ad::Tape& tape, const ParamStore& store, const ad::CVar& x) const;

private:
    ComplexSpectrumAttention attention_;
    ComplexLayerNorm norm1_;
    ComplexFeedForward ffn_;
    ComplexLayerNorm norm2_;
};

// ------------------------------------------------------------------- real --

class Linear {
public:
    Linear() = default;
    Linear(ParamStore& store, const std::string& prefix, Index in, Index out, bool bias = true);

    ad::Var forward(ad::Tape& tape, const ParamStore& store, const ad::Var& x) const;

private:
    std::size_t weight_ = 0;
    std::size_t bias_ = 0;
    bool has_bias_ = false;
};

/// Standard scaled dot-product multi-head attention.
class MultiHeadAttention {
public:
    MultiHeadAttention() = default;
    MultiHeadAttention(ParamStore& store, const std::string& prefix, const EncoderLayerConfig& config);

    ad::Var forward(ad::Tape& tape, const ParamStore& store, const ad::Var& tokens,
                    std::vector<ad::Var>* attention = nullptr) const;

private:
    EncoderLayerConfig config_;
    Linear query_;
    Linear key_;
    Linear value_;
    Linear output_;
};

class LayerNorm {
public:
    LayerNorm() = default;
    LayerNorm(ParamStore& store, const std::string& prefix, Index dim);

    ad::Var forward(ad::Tape& tape, const ParamStore& store, const ad::Var& x) const;

private:
    std::size_t gain_ = 0;
    std::size_t shift_ = 0;
};

class FeedForward {
public:
    FeedForward() = default;
    FeedForward(ParamStore& store, const std::string& prefix, Index dim, Index hidden);

    ad::Var forward(ad::Tape& tape, const ParamStore& store, const ad::Var& x) const;

private:
    Linear expand_;
    Linear contract_;
};

class EncoderLayer {
public:
    EncoderLayer() = default;
    EncoderLayer(ParamStore& store, const std::string& prefix, const EncoderLayerConfig& config);

    ad::Var forward(ad::Tape& tape, const ParamStore& store, const ad::Var& x) const;

private:
    MultiHeadAttention attention_;
    LayerNorm norm1_;
    FeedForward ffn_;
    LayerNorm norm2_;
};

// ------------------------------------------------------------------ RevIN --

struct TimeRevin {
    ad::Var normalized;
    ad::Var mean; ///< 1x1
    ad::Var std;  ///< 1x1, >= eps
};

struct FreqRevin {
    ad::CVar normalized;
    ad::CVar mean; ///< 1x1 complex
    ad::Var std;   ///< 1x1, std of |F|, >= eps
};

TimeRevin revin_time_normalize(const ad::Var& x, double eps = kNormEpsilon);
ad::Var revin_time_denormalize(const ad::Var& y, const TimeRevin& state);

FreqRevin revin_freq_normalize(const ad::CVar& spectrum, double eps = kNormEpsilon);
ad::CVar revin_freq_denormalize(const ad::CVar& spectrum, const FreqRevin& state);

} // namespace atfnet::nn
