#pragma once

#include <atfnet/spectral.hpp>

#include <Eigen/Core>

#include <vector>

namespace atfnet {

using Eigen::Index;

/// How many members of the harmonic series {k, 2k, ...} count towards E_h.
class HarmonicSelection {
public:
    static constexpr Index kDefaultCount = 10;

    static HarmonicSelection all() { return HarmonicSelection(0); }
    static HarmonicSelection first(Index n);

    bool is_all() const { return count_ == 0; }
    Index count() const { return count_; }

    friend bool operator==(const HarmonicSelection&, const HarmonicSelection&) = default;

private:
    explicit HarmonicSelection(Index n) : count_(n) {}
    Index count_;
};

inline HarmonicSelection default_harmonics() { return HarmonicSelection::first(HarmonicSelection::kDefaultCount); }

/// Blend weights of the frequency and time branches for one window.
struct EnergyWeights {
    double w_f = 0.0;
    double w_t = 1.0;
    Index fundamental_index = 1;
    std::vector<double> harmonic_energies; ///< |F[nk]|^2 for each harmonic n that was used
    double total_energy = 0.0;             ///< E_f over bins 0..floor(L/2)
    bool fallback = false;                 ///< true when no periodic structure could be measured

    double harmonic_energy() const;
    static EnergyWeights time_only();
};

/// Bin of largest magnitude in [1, floor(n/2)], DC excluded. Magnitudes within
/// a relative 1e-9 of the maximum count as ties and resolve to the lowest bin.
/// Throws NoDominantFrequency when every non-DC bin is (numerically) zero.
Index naive_pitch(const spectral::ComplexSpectrum& spectrum);

/// Dominant harmonic series energy weighting of a raw window.
EnergyWeights harmonic_weights(const spectral::RealSeries& x, HarmonicSelection harmonics = default_harmonics());

/// Same, but a constant window falls back to w_f = 0 instead of throwing.
EnergyWeights harmonic_weights_or_time_only(const spectral::RealSeries& x,
                                            HarmonicSelection harmonics = default_harmonics());

/// (lambda - 2 sqrt(lambda)) / (lambda - 2 sqrt(lambda) + 1). At lambda == 1
/// the denominator vanishes and -infinity is returned; the bound is vacuous for
/// lambda <= 4 anyway. An infinite lambda (no residual) gives the limit 1.
double theorem2_lower_bound(double lambda);

/// A window split into a strictly periodic part and a remainder.
struct PeriodicDecomposition {
    spectral::RealSeries periodic_part;
    spectral::RealSeries residual_part;
    double lambda = 0.0;
    Index period = 0;
    Index repetitions = 0;

    spectral::RealSeries combined() const { return periodic_part + residual_part; }
};

struct HarmonicBoundReport {
    double ratio = 0.0;
    double bound = 0.0;
    bool holds = false;
};

/// Energy fraction of the harmonic group {n * repetitions : n = 0..period-1}
/// of the full length-L spectrum, checked against the lower bound.
HarmonicBoundReport verify_theorem2(const PeriodicDecomposition& decomposition);

} // namespace atfnet
