#include <atfnet/error.hpp>
#include <atfnet/fblock.hpp>
#include <atfnet/spectral.hpp>

namespace atfnet {

FBlock::FBlock(const FBlockConfig& config, nn::ParamStore& store, const std::string& prefix) : config_(config)
{
    config.validate();
    const Index bins = config.spectrum_len();
    const Index features = config.tokenization == Tokenization::Bins ? 1 : bins;
    const nn::EncoderLayerConfig encoder = config.encoder();

    embed_ = nn::ComplexLinear(store, prefix + ".embed", features, config.model_dim);
    for (Index m = 0; m < config.layers; ++m) {
        layers_.emplace_back(store, prefix + ".layer" + std::to_string(m), encoder);
    }
    project_ = nn::ComplexLinear(store, prefix + ".project", config.model_dim, features);

    const Index total = config.lookback + config.horizon;
    dft_re_.resize(bins, config.lookback);
    dft_im_.resize(bins, config.lookback);
    for (Index k = 0; k < bins; ++k) {
        for (Index n = 0; n < config.lookback; ++n) {
            const auto w = spectral::unit_root<double>(k * n, total);
            dft_re_(k, n) = w.real();
            dft_im_(k, n) = w.imag();
        }
    }

    // x[t] = (1/N) [Re F0 + sum_k 2 (Re Fk cos - Im Fk sin) + Re F_{N/2} cos(pi t)]
    // with the DC and Nyquist imaginary parts discarded, as expand_half_to_full does.
    tail_re_.resize(config.horizon, bins);
    tail_im_.resize(config.horizon, bins);
    const auto scale = 1.0 / static_cast<double>(total);
    for (Index j = 0; j < config.horizon; ++j) {
        const Index t = config.lookback + j;
        for (Index k = 0; k < bins; ++k) {
            const auto w = std::conj(spectral::unit_root<double>(k * t, total));
            const bool self_mirrored = (k == 0) || (2 * k == total);
            const double weight = self_mirrored ? scale : 2.0 * scale;
            tail_re_(j, k) = weight * w.real();
            tail_im_(j, k) = self_mirrored ? 0.0 : -weight * w.imag();
        }
    }
}

ad::CVar FBlock::extended_dft(ad::Tape& tape, const ad::Var& x) const
{
    if (x.rows() != config_.lookback || x.cols() != 1) {
        throw Error(ErrorCode::ShapeMismatch, "F-block expects a " + std::to_string(config_.lookback) + "x1 window");
    }
    const auto spectrum = spectral::extended_dft(x.value().col(0), config_.horizon);
    const int ix = x.id();
    auto make = [&](ad::Matrix value, const ad::Matrix& basis) {
        return tape.record(std::move(value), {x}, [ix, &basis](ad::Tape& t, const ad::Matrix& g) {
            t.grad(ix).noalias() += basis.transpose() * g;
        });
    };
    return {make(spectrum.values.real(), dft_re_), make(spectrum.values.imag(), dft_im_)};
}

ad::Var FBlock::forecast_tail(ad::Tape& tape, const ad::CVar& half) const
{
    spectral::ComplexSpectrum spectrum;
    spectrum.source_len = config_.lookback;
    spectrum.total_len = config_.lookback + config_.horizon;
    spectrum.layout = spectral::Layout::HalfNonRedundant;
    spectrum.values.resize(half.rows());
    spectrum.values.real() = half.re.value().col(0);
    spectrum.values.imag() = half.im.value().col(0);
    const spectral::RealSeries series = spectral::idft(spectral::expand_half_to_full(spectrum));

    const int ir = half.re.id();
    const int ii = half.im.id();
    return tape.record(series.tail(config_.horizon), {half.re, half.im},
                       [this, ir, ii](ad::Tape& t, const ad::Matrix& g) {
                           if (t.requires_grad(ir)) {
                               t.grad(ir).noalias() += tail_re_.transpose() * g;
                           }
                           if (t.requires_grad(ii)) {
                               t.grad(ii).noalias() += tail_im_.transpose() * g;
                           }
                       });
}

ad::Var FBlock::forward(ad::Tape& tape, const nn::ParamStore& store, const ad::Var& x) const
{
    const nn::FreqRevin revin = nn::revin_freq_normalize(extended_dft(tape, x));

    const bool bins = config_.tokenization == Tokenization::Bins;
    ad::CVar tokens = bins ? revin.normalized : ad::ctranspose(revin.normalized);
    tokens = embed_.forward(tape, store, tokens);
    for (const auto& layer : layers_) {
        tokens = layer.forward(tape, store, tokens);
    }
    ad::CVar out = project_.forward(tape, store, tokens);
    if (!bins) {
        out = ad::ctranspose(out);
    }
    return forecast_tail(tape, nn::revin_freq_denormalize(out, revin));
}

Index FBlock::param_count(const FBlockConfig& c)
{
    const Index bins = c.spectrum_len();
    const Index features = c.tokenization == Tokenization::Bins ? 1 : bins;
    const Index d = c.model_dim;
    const Index hd = c.heads * c.head_dim;
    const Index linear_io = 2 * (features * d + d) + 2 * (d * features + features);
    const Index attention = 2 * (3 * d * hd + hd * d);
    const Index norms = 2 * (2 * 2 * d);
    const Index ffn = 2 * (d * c.ffn_dim + c.ffn_dim) + 2 * (c.ffn_dim * d + d);
    return linear_io + c.layers * (attention + norms + ffn);
}

} // namespace atfnet
