#pragma once

// Reversible instance normalisation on plain values. The in-graph versions
// used by the forecasting blocks live in layers.hpp.

#include <atfnet/nn/layers.hpp>
#include <atfnet/spectral.hpp>

#include <complex>

namespace atfnet::nn {

/// Per-window statistics. For the time variant `mean` is real (imag == 0).
struct RevinState {
    std::complex<double> mean;
    double std = 1.0; ///< never below epsilon
    double epsilon = kNormEpsilon;
};

/// (F - mean) / std with mean the complex mean of the bins and std the
/// population standard deviation of |F[k]|.
std::pair<spectral::ComplexSpectrum, RevinState> revin_freq_normalize(const spectral::ComplexSpectrum& spectrum,
                                                                      double eps = kNormEpsilon);
spectral::ComplexSpectrum revin_freq_denormalize(const spectral::ComplexSpectrum& spectrum, const RevinState& state);

std::pair<spectral::RealSeries, RevinState> revin_time_normalize(const spectral::RealSeries& x,
                                                                 double eps = kNormEpsilon);
spectral::RealSeries revin_time_denormalize(const spectral::RealSeries& y, const RevinState& state);

} // namespace atfnet::nn
