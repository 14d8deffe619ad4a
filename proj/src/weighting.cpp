#include <atfnet/weighting.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace atfnet {

namespace {

constexpr double kTieTolerance = 1e-9;
constexpr double kSilentSpectrum = 1e-12;
constexpr double kBoundSlack = 1e-12;

} // namespace

HarmonicSelection HarmonicSelection::first(Index n)
{
    if (n < 1) {
        throw Error(ErrorCode::InvalidInput, "harmonic count must be positive");
    }
    return HarmonicSelection(n);
}

double EnergyWeights::harmonic_energy() const
{
    return std::accumulate(harmonic_energies.begin(), harmonic_energies.end(), 0.0);
}

EnergyWeights EnergyWeights::time_only()
{
    EnergyWeights w;
    w.fallback = true;
    return w;
}

Index naive_pitch(const spectral::ComplexSpectrum& spectrum)
{
    const Index last = std::min<Index>(spectrum.total_len / 2, spectrum.values.size() - 1);
    if (spectrum.values.size() < 2 || last < 1) {
        throw Error(ErrorCode::InvalidInput, "pitch detection needs at least two bins");
    }
    const Eigen::VectorXd magnitude = spectrum.values.head(last + 1).cwiseAbs();
    const double peak = magnitude.tail(last).maxCoeff();
    if (peak == 0.0 || peak <= kSilentSpectrum * magnitude.norm()) {
        throw Error(ErrorCode::NoDominantFrequency, "all non-DC bins are zero");
    }
    for (Index k = 1; k <= last; ++k) {
        if (magnitude(k) >= peak * (1.0 - kTieTolerance)) {
            return k;
        }
    }
    return last; // unreachable: the peak itself satisfies the test
}

EnergyWeights harmonic_weights(const spectral::RealSeries& x, HarmonicSelection harmonics)
{
    if (x.size() < 4) {
        throw Error(ErrorCode::InvalidInput, "weighting needs a window of at least 4 samples");
    }
    const auto half = spectral::to_half(spectral::dft(x));
    const Index last = x.size() / 2;

    EnergyWeights w;
    w.total_energy = spectral::energy_freq(half);
    if (w.total_energy == 0.0) {
        return EnergyWeights::time_only();
    }
    w.fundamental_index = naive_pitch(half);

    const Index k = w.fundamental_index;
    for (Index n = 1; n * k <= last; ++n) {
        if (!harmonics.is_all() && n > harmonics.count()) {
            break;
        }
        w.harmonic_energies.push_back(std::norm(half.values(n * k)));
    }
    w.w_f = std::clamp(w.harmonic_energy() / w.total_energy, 0.0, 1.0);
    w.w_t = 1.0 - w.w_f;
    return w;
}

EnergyWeights harmonic_weights_or_time_only(const spectral::RealSeries& x, HarmonicSelection harmonics)
{
    try {
        return harmonic_weights(x, harmonics);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::NoDominantFrequency) {
            return EnergyWeights::time_only();
        }
        throw;
    }
}

double theorem2_lower_bound(double lambda)
{
    if (!(lambda > 0.0)) {
        throw Error(ErrorCode::InvalidInput, "lambda must be positive");
    }
    if (std::isinf(lambda)) {
        return 1.0;
    }
    const double numerator = lambda - 2.0 * std::sqrt(lambda);
    const double denominator = numerator + 1.0;
    if (denominator == 0.0) {
        return -std::numeric_limits<double>::infinity();
    }
    return numerator / denominator;
}

HarmonicBoundReport verify_theorem2(const PeriodicDecomposition& decomposition)
{
    const spectral::RealSeries x = decomposition.combined();
    const Index length = x.size();
    if (decomposition.period < 1 || decomposition.repetitions < 1 ||
        decomposition.period * decomposition.repetitions != length) {
        throw Error(ErrorCode::InvalidInput, "decomposition length must equal period * repetitions");
    }
    const auto full = spectral::dft(x);

    double harmonic = 0.0;
    for (Index n = 0; n < decomposition.period; ++n) {
        harmonic += std::norm(full.values(n * decomposition.repetitions));
    }
    const double total = spectral::energy_freq(full);

    HarmonicBoundReport report;
    report.ratio = total > 0.0 ? harmonic / total : 1.0;
    report.bound = theorem2_lower_bound(decomposition.lambda);
    report.holds = report.ratio >= report.bound - kBoundSlack;
    return report;
}

} // namespace atfnet
