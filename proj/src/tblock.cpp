#include <atfnet/error.hpp>
#include <atfnet/tblock.hpp>

namespace atfnet {

Eigen::MatrixXd make_patches(const Eigen::VectorXd& x, Index patch, Index stride)
{
    if (patch < 1 || stride < 1) {
        throw Error(ErrorCode::InvalidInput, "patch length and stride must be positive");
    }
    if (patch > x.size()) {
        throw Error(ErrorCode::PatchTooLong,
                    "patch length " + std::to_string(patch) + " exceeds series length " + std::to_string(x.size()));
    }
    const Index count = (x.size() - patch) / stride + 1;
    Eigen::MatrixXd out(count, patch);
    for (Index j = 0; j < count; ++j) {
        out.row(j) = x.segment(j * stride, patch).transpose();
    }
    return out;
}

TBlock::TBlock(const TBlockConfig& config, nn::ParamStore& store, const std::string& prefix) : config_(config)
{
    config.validate();
    const Index patches = config.num_patches();
    embed_ = nn::Linear(store, prefix + ".embed", config.patch_len, config.model_dim);
    position_ = store.add(prefix + ".position", {patches, config.model_dim}, false, nn::InitRule::Positional);
    const nn::EncoderLayerConfig encoder = config.encoder();
    for (Index m = 0; m < config.layers; ++m) {
        layers_.emplace_back(store, prefix + ".layer" + std::to_string(m), encoder);
    }
    head_ = nn::Linear(store, prefix + ".head", patches * config.model_dim, config.horizon);
}

ad::Var TBlock::forward(ad::Tape& tape, const nn::ParamStore& store, const ad::Var& x) const
{
    if (x.rows() != config_.lookback || x.cols() != 1) {
        throw Error(ErrorCode::ShapeMismatch, "T-block expects a " + std::to_string(config_.lookback) + "x1 window");
    }
    const nn::TimeRevin revin = nn::revin_time_normalize(x);
    const ad::Var patches = ad::unfold(revin.normalized, config_.patch_len, config_.stride);
    ad::Var h = ad::add(embed_.forward(tape, store, patches), store.real(tape, position_));
    for (const auto& layer : layers_) {
        h = layer.forward(tape, store, h);
    }
    const ad::Var y = ad::transpose(head_.forward(tape, store, ad::flatten_rows(h)));
    return nn::revin_time_denormalize(y, revin);
}

Index TBlock::param_count(const TBlockConfig& c)
{
    const Index d = c.model_dim;
    const Index patches = c.num_patches();
    const Index embed = c.patch_len * d + d + patches * d;
    const Index attention = 4 * (d * d + d);
    const Index norms = 2 * 2 * d;
    const Index ffn = d * c.ffn_dim + c.ffn_dim + c.ffn_dim * d + d;
    const Index head = patches * d * c.horizon + c.horizon;
    return embed + c.layers * (attention + norms + ffn) + head;
}

} // namespace atfnet
