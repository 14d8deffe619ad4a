#pragma once

#include <atfnet/nn/gradcheck.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace atfnet {

inline constexpr double kLayerTolerance = 1e-5;
inline constexpr double kEndToEndTolerance = 1e-4;

/// Every check differentiates kProbeScale * sum(out .* R) for a random R.
/// The 1e-8 floor in the relative error is absolute while finite-difference
/// roundoff is proportional to |loss|; at O(1) loss, gradients that vanish
/// identically (a real shift of every F-block bin only reaches sample 0, a
/// key bias only shifts a softmax row) or cross zero by chance read as
/// 1e-2..1e-4 errors. At this scale the floor sits above the roundoff.
inline constexpr double kProbeScale = 1e-5;

struct LayerCheck {
    std::string layer;
    double tolerance = 0.0;
    nn::GradcheckReport report;
};

/// complex_linear, csa, complex_layernorm, complex_ffn, complex_encoder,
/// revin_freq, revin_time, linear, attention, layernorm, ffn, encoder,
/// fblock, tblock, atfnet.
const std::vector<std::string>& gradcheck_layers();

/// Random parameters and inputs (inputs are checked too) drawn from `seed`.
LayerCheck check_layer(const std::string& layer, std::uint64_t seed);

std::vector<LayerCheck> gradcheck_suite(std::uint64_t seed);

} // namespace atfnet
