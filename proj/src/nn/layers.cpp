#include <atfnet/error.hpp>
#include <atfnet/nn/layers.hpp>

#include <cmath>

namespace atfnet::nn {

void EncoderLayerConfig::validate() const
{
    if (model_dim < 1 || head_dim < 1 || num_heads < 1 || ffn_dim < 1) {
        throw Error(ErrorCode::InvalidInput, "encoder dimensions must be positive");
    }
}

// ---------------------------------------------------------------- complex --

ComplexLinear::ComplexLinear(ParamStore& store, const std::string& prefix, Index in, Index out, bool bias)
    : in_(in), out_(out), has_bias_(bias)
{
    weight_ = store.add(prefix + ".weight", {in, out}, true, InitRule::FanIn, 2 * in);
    if (bias) {
        bias_ = store.add(prefix + ".bias", {out}, true, InitRule::Zero);
    }
}

ad::CVar ComplexLinear::forward(ad::Tape& tape, const ParamStore& store, const ad::CVar& x) const
{
    ad::CVar y = ad::cmatmul(x, store.complex(tape, weight_));
    if (has_bias_) {
        y = ad::cadd_row(y, store.complex(tape, bias_));
    }
    return y;
}

ComplexSpectrumAttention::ComplexSpectrumAttention(ParamStore& store, const std::string& prefix,
                                                   const EncoderLayerConfig& config)
    : config_(config)
{
    config.validate();
    const Index d = config.model_dim;
    const Index hd = config.num_heads * config.head_dim;
    query_ = store.add(prefix + ".query", {d, hd}, true, InitRule::FanIn, 2 * d);
    key_ = store.add(prefix + ".key", {d, hd}, true, InitRule::FanIn, 2 * d);
    value_ = store.add(prefix + ".value", {d, hd}, true, InitRule::FanIn, 2 * d);
    output_ = store.add(prefix + ".output", {hd, d}, true, InitRule::FanIn, 2 * hd);
}

ad::CVar ComplexSpectrumAttention::forward(ad::Tape& tape, const ParamStore& store, const ad::CVar& tokens,
                                           std::vector<ad::Var>* attention) const
{
    if (tokens.cols() != config_.model_dim) {
        throw Error(ErrorCode::ShapeMismatch, "attention input width " + std::to_string(tokens.cols()) +
                                                  " != model_dim " + std::to_string(config_.model_dim));
    }
    const ad::CVar q = ad::cmatmul(tokens, store.complex(tape, query_));
    const ad::CVar k = ad::cmatmul(tokens, store.complex(tape, key_));
    const ad::CVar v = ad::cmatmul(tokens, store.complex(tape, value_));

    std::vector<ad::CVar> heads;
    for (Index h = 0; h < config_.num_heads; ++h) {
        const Index start = h * config_.head_dim;
        const ad::CVar qh = ad::cslice_cols(q, start, config_.head_dim);
        ad::CVar kh = ad::cslice_cols(k, start, config_.head_dim);
        if (config_.conjugate_keys) {
            kh = ad::cconj(kh);
        }
        ad::Var logits = ad::cmodulus(ad::cmatmul(qh, ad::ctranspose(kh)));
        if (config_.attention_scale == AttentionScale::InvSqrtD) {
            logits = ad::scale(logits, 1.0 / std::sqrt(static_cast<double>(config_.head_dim)));
        }
        const ad::Var weights = ad::softmax_rows(logits);
        if (attention != nullptr) {
            attention->push_back(weights);
        }
        heads.push_back(ad::rmatmul(weights, ad::cslice_cols(v, start, config_.head_dim)));
    }
    return ad::cmatmul(ad::chcat(heads), store.complex(tape, output_));
}

ComplexLayerNorm::ComplexLayerNorm(ParamStore& store, const std::string& prefix, Index dim)
{
    gain_ = store.add(prefix + ".gain", {dim}, true, InitRule::One);
    shift_ = store.add(prefix + ".shift", {dim}, true, InitRule::Zero);
}

ad::CVar ComplexLayerNorm::forward(ad::Tape& tape, const ParamStore& store, const ad::CVar& x) const
{
    const ad::CVar centred = ad::csub_col(x, ad::crow_mean(x));
    const ad::Var magnitude = ad::cmodulus(centred);
    const ad::Var spread = ad::sub_col(magnitude, ad::row_mean(magnitude));
    const ad::Var std = ad::sqrt_floor(ad::row_mean(ad::square(spread)), kNormEpsilon);
    const ad::CVar normalized = ad::cdiv_col(centred, std);
    return ad::cadd_row(ad::cmul_row(normalized, store.complex(tape, gain_)), store.complex(tape, shift_));
}

ComplexFeedForward::ComplexFeedForward(ParamStore& store, const std::string& prefix, Index dim, Index hidden)
    : expand_(store, prefix + ".expand", dim, hidden), contract_(store, prefix + ".contract", hidden, dim)
{
}

ad::CVar ComplexFeedForward::forward(ad::Tape& tape, const ParamStore& store, const ad::CVar& x) const
{
    return contract_.forward(tape, store, ad::split_relu(expand_.forward(tape, store, x)));
}

ComplexEncoderLayer::ComplexEncoderLayer(ParamStore& store, const std::string& prefix,
                                         const EncoderLayerConfig& config)
    : attention_(store, prefix + ".attention", config),
      norm1_(store, prefix + ".norm1", config.model_dim),
      ffn_(store, prefix + ".ffn", config.model_dim, config.ffn_dim),
      norm2_(store, prefix + ".norm2", config.model_dim)
{
}

ad::CVar ComplexEncoderLayer::forward(ad::Tape& tape, const ParamStore& store, const ad::CVar& x) const
{
    const ad::CVar a = norm1_.forward(tape, store, ad::cadd(x, attention_.forward(tape, store, x)));
    return norm2_.forward(tape, store, ad::cadd(a, ffn_.forward(tape, store, a)));
}

// ------------------------------------------------------------------- real --

Linear::Linear(ParamStore& store, const std::string& prefix, Index in, Index out, bool bias) : has_bias_(bias)
{
    weight_ = store.add(prefix + ".weight", {in, out}, false, InitRule::FanIn, in);
    if (bias) {
        bias_ = store.add(prefix + ".bias", {out}, false, InitRule::Zero);
    }
}

ad::Var Linear::forward(ad::Tape& tape, const ParamStore& store, const ad::Var& x) const
{
    ad::Var y = ad::matmul(x, store.real(tape, weight_));
    if (has_bias_) {
        y = ad::add_row(y, store.real(tape, bias_));
    }
    return y;
}

MultiHeadAttention::MultiHeadAttention(ParamStore& store, const std::string& prefix,
                                       const EncoderLayerConfig& config)
    : config_(config),
      query_(store, prefix + ".query", config.model_dim, config.num_heads * config.head_dim),
      key_(store, prefix + ".key", config.model_dim, config.num_heads * config.head_dim),
      value_(store, prefix + ".value", config.model_dim, config.num_heads * config.head_dim),
      output_(store, prefix + ".output", config.num_heads * config.head_dim, config.model_dim)
{
    config.validate();
}

ad::Var MultiHeadAttention::forward(ad::Tape& tape, const ParamStore& store, const ad::Var& tokens,
                                    std::vector<ad::Var>* attention) const
{
    const ad::Var q = query_.forward(tape, store, tokens);
    const ad::Var k = key_.forward(tape, store, tokens);
    const ad::Var v = value_.forward(tape, store, tokens);
    const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(config_.head_dim));

    std::vector<ad::Var> heads;
    for (Index h = 0; h < config_.num_heads; ++h) {
        const Index start = h * config_.head_dim;
        const ad::Var qh = ad::slice_cols(q, start, config_.head_dim);
        const ad::Var kh = ad::slice_cols(k, start, config_.head_dim);
        const ad::Var weights = ad::softmax_rows(ad::scale(ad::matmul(qh, ad::transpose(kh)), inv_sqrt_d));
        if (attention != nullptr) {
            attention->push_back(weights);
        }
        heads.push_back(ad::matmul(weights, ad::slice_cols(v, start, config_.head_dim)));
    }
    return output_.forward(tape, store, ad::hcat(heads));
}

LayerNorm::LayerNorm(ParamStore& store, const std::string& prefix, Index dim)
{
    gain_ = store.add(prefix + ".gain", {dim}, false, InitRule::One);
    shift_ = store.add(prefix + ".shift", {dim}, false, InitRule::Zero);
}

ad::Var LayerNorm::forward(ad::Tape& tape, const ParamStore& store, const ad::Var& x) const
{
    const ad::Var centred = ad::sub_col(x, ad::row_mean(x));
    const ad::Var std = ad::sqrt_floor(ad::row_mean(ad::square(centred)), kNormEpsilon);
    return ad::add_row(ad::mul_row(ad::div_col(centred, std), store.real(tape, gain_)), store.real(tape, shift_));
}

FeedForward::FeedForward(ParamStore& store, const std::string& prefix, Index dim, Index hidden)
    : expand_(store, prefix + ".expand", dim, hidden), contract_(store, prefix + ".contract", hidden, dim)
{
}

ad::Var FeedForward::forward(ad::Tape& tape, const ParamStore& store, const ad::Var& x) const
{
    return contract_.forward(tape, store, ad::relu(expand_.forward(tape, store, x)));
}

EncoderLayer::EncoderLayer(ParamStore& store, const std::string& prefix, const EncoderLayerConfig& config)
    : attention_(store, prefix + ".attention", config),
      norm1_(store, prefix + ".norm1", config.model_dim),
      ffn_(store, prefix + ".ffn", config.model_dim, config.ffn_dim),
      norm2_(store, prefix + ".norm2", config.model_dim)
{
}

ad::Var EncoderLayer::forward(ad::Tape& tape, const ParamStore& store, const ad::Var& x) const
{
    const ad::Var a = norm1_.forward(tape, store, ad::add(x, attention_.forward(tape, store, x)));
    return norm2_.forward(tape, store, ad::add(a, ffn_.forward(tape, store, a)));
}

// ------------------------------------------------------------------ RevIN --

TimeRevin revin_time_normalize(const ad::Var& x, double eps)
{
    const ad::Var mean = ad::mean_all(x);
    const ad::Var centred = ad::sub_scalar(x, mean);
    const ad::Var std = ad::sqrt_floor(ad::mean_all(ad::square(centred)), eps);
    return {ad::div_scalar(centred, std), mean, std};
}

ad::Var revin_time_denormalize(const ad::Var& y, const TimeRevin& state)
{
    return ad::add_scalar(ad::mul_scalar(y, state.std), state.mean);
}

FreqRevin revin_freq_normalize(const ad::CVar& spectrum, double eps)
{
    const ad::CVar mean = ad::cmean_all(spectrum);
    const ad::Var magnitude = ad::cmodulus(spectrum);
    const ad::Var spread = ad::sub_scalar(magnitude, ad::mean_all(magnitude));
    const ad::Var std = ad::sqrt_floor(ad::mean_all(ad::square(spread)), eps);
    return {ad::cdiv_real_scalar(ad::csub_scalar(spectrum, mean), std), mean, std};
}

ad::CVar revin_freq_denormalize(const ad::CVar& spectrum, const FreqRevin& state)
{
    return ad::cadd_scalar(ad::cmul_real_scalar(spectrum, state.std), state.mean);
}

} // namespace atfnet::nn
