#pragma once

// Exact DFT kernels on the frequency grid of an extended (look-back + horizon)
// series. Everything is direct O(n^2) summation over a twiddle table.

#include <atfnet/error.hpp>

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

namespace atfnet::spectral {

using Eigen::Index;

enum class Layout { Full, HalfNonRedundant };

template <typename Scalar>
using Series = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using ComplexVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

/// Spectrum of a real series of `source_len` samples evaluated on the
/// `total_len`-point DFT grid.
template <typename Scalar>
struct BasicSpectrum {
    ComplexVector<Scalar> values;
    Index source_len = 0;
    Index total_len = 0;
    Layout layout = Layout::Full;
};

using ComplexSpectrum = BasicSpectrum<double>;
using RealSeries = Series<double>;

/// Number of non-redundant bins of a real series of length n.
constexpr Index half_length(Index n) { return n / 2 + 1; }

/// exp(-2*pi*i*j/n). Quarter-turn points are exact and the lower half of the
/// circle is the conjugate of the upper half, so conjugate symmetry of
/// real-input spectra holds bit-for-bit.
template <typename Scalar>
std::complex<Scalar> unit_root(Index j, Index n)
{
    j %= n;
    if (j < 0) {
        j += n;
    }
    if (2 * j > n) {
        return std::conj(unit_root<Scalar>(n - j, n));
    }
    if (j == 0) {
        return {Scalar(1), Scalar(0)};
    }
    if (2 * j == n) {
        return {Scalar(-1), Scalar(0)};
    }
    if (4 * j == n) {
        return {Scalar(0), Scalar(-1)};
    }
    const Scalar angle = Scalar(2) * std::numbers::pi_v<Scalar> * Scalar(j) / Scalar(n);
    return {std::cos(angle), -std::sin(angle)};
}

template <typename Scalar>
std::vector<std::complex<Scalar>> twiddle_table(Index n)
{
    std::vector<std::complex<Scalar>> table(static_cast<std::size_t>(n));
    for (Index j = 0; j < n; ++j) {
        table[static_cast<std::size_t>(j)] = unit_root<Scalar>(j, n);
    }
    return table;
}

namespace detail {

template <typename Derived>
void require_finite_series(const Eigen::MatrixBase<Derived>& x)
{
    if (x.size() < 1) {
        throw Error(ErrorCode::InvalidInput, "series must contain at least one sample");
    }
    if (!x.allFinite()) {
        throw Error(ErrorCode::InvalidInput, "series contains non-finite values");
    }
}

/// First `bins` bins of sum_n x[n] exp(-2 pi i k n / grid).
template <typename Derived>
auto project(const Eigen::MatrixBase<Derived>& x, Index grid, Index bins)
{
    using Scalar = typename Derived::Scalar;
    const auto table = twiddle_table<Scalar>(grid);
    ComplexVector<Scalar> out(bins);
    for (Index k = 0; k < bins; ++k) {
        std::complex<Scalar> acc(0);
        Index phase = 0;
        for (Index n = 0; n < x.size(); ++n) {
            acc += x(n) * table[static_cast<std::size_t>(phase)];
            phase += k;
            if (phase >= grid) {
                phase -= grid;
            }
        }
        out(k) = acc;
    }
    return out;
}

} // namespace detail

/// Full L-point DFT.
template <typename Derived>
BasicSpectrum<typename Derived::Scalar> dft(const Eigen::MatrixBase<Derived>& x)
{
    detail::require_finite_series(x);
    const Index n = x.size();
    return {detail::project(x, n, n), n, n, Layout::Full};
}

/// DFT of x on the (L+T)-point grid, keeping the floor((L+T)/2)+1
/// non-redundant bins. Identical to the DFT of x zero-padded by T samples.
template <typename Derived>
BasicSpectrum<typename Derived::Scalar> extended_dft(const Eigen::MatrixBase<Derived>& x, Index horizon)
{
    detail::require_finite_series(x);
    if (horizon < 0) {
        throw Error(ErrorCode::InvalidInput, "horizon must be non-negative");
    }
    const Index total = x.size() + horizon;
    return {detail::project(x, total, half_length(total)), x.size(), total, Layout::HalfNonRedundant};
}

/// Inverse DFT of a full spectrum. The imaginary residue of every sample must
/// be below 1e-6 * (1 + |Re|); anything larger means the spectrum was not
/// conjugate-symmetric.
template <typename Scalar>
Series<Scalar> idft(const BasicSpectrum<Scalar>& spectrum)
{
    if (spectrum.layout != Layout::Full) {
        throw Error(ErrorCode::InvalidInput, "idft expects a full-layout spectrum");
    }
    const Index n = spectrum.total_len;
    if (spectrum.values.size() != n || n < 1) {
        throw Error(ErrorCode::InvalidInput, "spectrum length does not match total_len");
    }
    const auto table = twiddle_table<Scalar>(n);
    Series<Scalar> out(n);
    for (Index t = 0; t < n; ++t) {
        std::complex<Scalar> acc(0);
        Index phase = 0;
        for (Index k = 0; k < n; ++k) {
            acc += spectrum.values(k) * std::conj(table[static_cast<std::size_t>(phase)]);
            phase += t;
            if (phase >= n) {
                phase -= n;
            }
        }
        acc /= Scalar(n);
        if (!(std::abs(acc.imag()) < Scalar(1e-6) * (Scalar(1) + std::abs(acc.real())))) {
            throw Error(ErrorCode::ImaginaryResidueTooLarge,
                        "sample " + std::to_string(t) + " has imaginary part " + std::to_string(acc.imag()));
        }
        out(t) = acc.real();
    }
    return out;
}

/// Mirror a half spectrum into the full conjugate-symmetric layout. The DC
/// bin, and the Nyquist bin for even lengths, are forced real.
template <typename Scalar>
BasicSpectrum<Scalar> expand_half_to_full(const BasicSpectrum<Scalar>& half)
{
    if (half.layout != Layout::HalfNonRedundant) {
        throw Error(ErrorCode::InvalidInput, "expand_half_to_full expects a half-layout spectrum");
    }
    const Index n = half.total_len;
    const Index bins = half_length(n);
    if (half.values.size() != bins) {
        throw Error(ErrorCode::InvalidInput, "half spectrum has " + std::to_string(half.values.size()) +
                                                 " bins, expected " + std::to_string(bins));
    }
    BasicSpectrum<Scalar> full{ComplexVector<Scalar>(n), half.source_len, n, Layout::Full};
    full.values(0) = {half.values(0).real(), Scalar(0)};
    for (Index k = 1; k < bins; ++k) {
        full.values(k) = half.values(k);
        full.values(n - k) = std::conj(half.values(k));
    }
    if (n % 2 == 0) {
        full.values(n / 2) = {half.values(n / 2).real(), Scalar(0)};
    }
    return full;
}

/// First floor(n/2)+1 bins of a full spectrum.
template <typename Scalar>
BasicSpectrum<Scalar> to_half(const BasicSpectrum<Scalar>& full)
{
    if (full.layout != Layout::Full) {
        throw Error(ErrorCode::InvalidInput, "to_half expects a full-layout spectrum");
    }
    const Index bins = half_length(full.total_len);
    return {full.values.head(bins), full.source_len, full.total_len, Layout::HalfNonRedundant};
}

template <typename Derived>
typename Derived::Scalar energy_time(const Eigen::MatrixBase<Derived>& x)
{
    return x.squaredNorm();
}

/// Sum of squared bin magnitudes over whatever bins the spectrum holds.
template <typename Scalar>
Scalar energy_freq(const BasicSpectrum<Scalar>& spectrum)
{
    return spectrum.values.squaredNorm();
}

template <typename Derived>
Series<typename Derived::Scalar> zero_pad(const Eigen::MatrixBase<Derived>& x, Index extra)
{
    Series<typename Derived::Scalar> out = Series<typename Derived::Scalar>::Zero(x.size() + extra);
    out.head(x.size()) = x;
    return out;
}

} // namespace atfnet::spectral
