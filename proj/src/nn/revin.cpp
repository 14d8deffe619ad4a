#include <atfnet/nn/revin.hpp>

#include <algorithm>
#include <cmath>

namespace atfnet::nn {

namespace {

double population_std(const Eigen::VectorXd& v)
{
    return std::sqrt((v.array() - v.mean()).square().mean());
}

} // namespace

std::pair<spectral::ComplexSpectrum, RevinState> revin_freq_normalize(const spectral::ComplexSpectrum& spectrum,
                                                                      double eps)
{
    RevinState state;
    state.epsilon = eps;
    state.mean = spectrum.values.mean();
    state.std = std::max(population_std(spectrum.values.cwiseAbs()), eps);

    spectral::ComplexSpectrum out = spectrum;
    out.values = (spectrum.values.array() - state.mean) / state.std;
    return {std::move(out), state};
}

spectral::ComplexSpectrum revin_freq_denormalize(const spectral::ComplexSpectrum& spectrum, const RevinState& state)
{
    spectral::ComplexSpectrum out = spectrum;
    out.values = spectrum.values.array() * state.std + state.mean;
    return out;
}

std::pair<spectral::RealSeries, RevinState> revin_time_normalize(const spectral::RealSeries& x, double eps)
{
    RevinState state;
    state.epsilon = eps;
    state.mean = x.mean();
    state.std = std::max(population_std(x), eps);
    return {(x.array() - state.mean.real()) / state.std, state};
}

spectral::RealSeries revin_time_denormalize(const spectral::RealSeries& y, const RevinState& state)
{
    return y.array() * state.std + state.mean.real();
}

} // namespace atfnet::nn
