#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support/oracles.hpp"

#include <atfnet/spectral.hpp>

#include <limits>

using namespace atfnet;
using namespace atfnet::spectral;
using C = std::complex<double>;

namespace {

RealSeries vec(std::initializer_list<double> v)
{
    RealSeries x(static_cast<Index>(v.size()));
    Index i = 0;
    for (double d : v) {
        x(i++) = d;
    }
    return x;
}

void check_bins(const ComplexVector<double>& got, std::initializer_list<C> want, double tol)
{
    REQUIRE(got.size() == static_cast<Index>(want.size()));
    Index k = 0;
    for (C w : want) {
        CHECK(std::abs(got(k) - w) <= tol);
        ++k;
    }
}

} // namespace

TEST_CASE("dft of a two-point symmetric series")
{
    const auto f = dft(vec({1, 1}));
    CHECK(f.layout == Layout::Full);
    CHECK(f.total_len == 2);
    check_bins(f.values, {C(2, 0), C(0, 0)}, 0.0);
}

TEST_CASE("dft of [1,2,3,4] matches direct summation")
{
    const RealSeries x = vec({1, 2, 3, 4});
    const auto f = dft(x);
    check_bins(f.values, {C(10, 0), C(-2, 2), C(-2, 0), C(-2, -2)}, 1e-12);
    const auto ref = oracle::dft(x);
    for (Index k = 0; k < 4; ++k) {
        CHECK(oracle::abs_diff(f.values(k), ref[static_cast<std::size_t>(k)]) < 1e-12);
    }
}

TEST_CASE("dft of zeros is zero")
{
    const auto f = dft(RealSeries::Zero(4));
    CHECK(f.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("dft rejects non-finite samples")
{
    RealSeries x = vec({1, 2, 3});
    x(1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(dft(x), Error);
    try {
        dft(x);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidInput);
    }
    x(1) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(extended_dft(x, 2), Error);
}

TEST_CASE("dft agrees with a long-double oracle on random series")
{
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const auto n = static_cast<Index>(1 + rng.below(64));
        const RealSeries x = oracle::random_series(rng, n);
        const auto f = dft(x);
        const auto ref = oracle::dft(x);
        const double scale = 1.0 + x.cwiseAbs().sum();
        for (Index k = 0; k < n; ++k) {
            CHECK(oracle::abs_diff(f.values(k), ref[static_cast<std::size_t>(k)]) <= 1e-12 * scale);
        }
    }
}

TEST_CASE("dft is linear")
{
    Rng rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        const auto n = static_cast<Index>(1 + rng.below(40));
        const RealSeries x = oracle::random_series(rng, n);
        const RealSeries y = oracle::random_series(rng, n);
        const double a = rng.uniform(-3, 3);
        const double b = rng.uniform(-3, 3);
        const auto lhs = dft(RealSeries(a * x + b * y)).values;
        const ComplexVector<double> rhs = a * dft(x).values + b * dft(y).values;
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + rhs.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("the kernels are generic over the scalar type")
{
    Eigen::Matrix<long double, Eigen::Dynamic, 1> x(4);
    x << 1, 2, 3, 4;
    const auto f = dft(x);
    static_assert(std::is_same_v<decltype(f.values)::Scalar, std::complex<long double>>);
    CHECK(std::abs(f.values(1) - std::complex<long double>(-2, 2)) < 1e-15L);
    const auto back = idft(f);
    CHECK((back - x).cwiseAbs().maxCoeff() < 1e-15L);
}

TEST_CASE("idft inverts dft")
{
    const RealSeries x = vec({1, 2, 3, 4});
    CHECK((idft(dft(x)) - x).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("idft of a DC-only spectrum")
{
    ComplexSpectrum f{ComplexVector<double>::Zero(4), 4, 4, Layout::Full};
    f.values(0) = 4.0;
    const RealSeries x = idft(f);
    CHECK((x - RealSeries::Ones(4)).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("idft rejects an asymmetric spectrum")
{
    ComplexSpectrum f{ComplexVector<double>::Zero(4), 4, 4, Layout::Full};
    f.values(1) = 1.0;
    try {
        idft(f);
        FAIL("expected ImaginaryResidueTooLarge");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ImaginaryResidueTooLarge);
    }
}

TEST_CASE("idft requires the full layout")
{
    const auto half = extended_dft(vec({1, 2}), 2);
    CHECK_THROWS_AS(idft(half), Error);
}

TEST_CASE("extended dft of a unit impulse")
{
    const auto f = extended_dft(vec({0, 1}), 2);
    CHECK(f.layout == Layout::HalfNonRedundant);
    CHECK(f.source_len == 2);
    CHECK(f.total_len == 4);
    check_bins(f.values, {C(1, 0), C(0, -1), C(-1, 0)}, 1e-15);
    check_bins(expand_half_to_full(f).values, {C(1, 0), C(0, -1), C(-1, 0), C(0, 1)}, 1e-15);
}

TEST_CASE("extended dft with no horizon is the half dft")
{
    const auto f = extended_dft(vec({1, 2, 3, 4}), 0);
    check_bins(f.values, {C(10, 0), C(-2, 2), C(-2, 0)}, 1e-12);
}

TEST_CASE("extended dft rejects a negative horizon")
{
    CHECK_THROWS_AS(extended_dft(vec({1, 2}), -1), Error);
}

TEST_CASE("extended dft equals the dft of the zero-padded series")
{
    Rng rng(13);
    for (int trial = 0; trial < 200; ++trial) {
        const auto l = static_cast<Index>(1 + rng.below(64));
        const auto t = static_cast<Index>(rng.below(65));
        const RealSeries x = oracle::random_series(rng, l);
        const auto ext = extended_dft(x, t);
        const auto padded = dft(zero_pad(x, t));
        REQUIRE(ext.values.size() == half_length(l + t));
        for (Index k = 0; k < ext.values.size(); ++k) {
            CHECK(std::abs(ext.values(k) - padded.values(k)) <= 1e-9 * (1.0 + std::abs(padded.values(k))));
        }
        // and both agree with the long-double oracle on the extended grid
        const auto ref = oracle::dft(x, l + t, ext.values.size());
        for (Index k = 0; k < ext.values.size(); ++k) {
            CHECK(oracle::abs_diff(ext.values(k), ref[static_cast<std::size_t>(k)]) <= 1e-11 * (1.0 + x.cwiseAbs().sum()));
        }
    }
}

TEST_CASE("expanding a half spectrum mirrors it and forces DC and Nyquist real")
{
    ComplexSpectrum half{ComplexVector<double>(3), 4, 4, Layout::HalfNonRedundant};
    half.values << C(2, 0.5), C(0, 0), C(0, 0);
    const auto full = expand_half_to_full(half);
    check_bins(full.values, {C(2, 0), C(0, 0), C(0, 0), C(0, 0)}, 0.0);

    half.values << C(1, 0), C(3, 4), C(5, 6);
    const auto f2 = expand_half_to_full(half);
    check_bins(f2.values, {C(1, 0), C(3, 4), C(5, 0), C(3, -4)}, 0.0);

    ComplexSpectrum odd{ComplexVector<double>(3), 5, 5, Layout::HalfNonRedundant};
    odd.values << C(1, 0), C(3, 4), C(5, 6);
    check_bins(expand_half_to_full(odd).values, {C(1, 0), C(3, 4), C(5, 6), C(5, -6), C(3, -4)}, 0.0);
}

TEST_CASE("expansion validates its input")
{
    ComplexSpectrum wrong{ComplexVector<double>::Zero(2), 4, 4, Layout::HalfNonRedundant};
    CHECK_THROWS_AS(expand_half_to_full(wrong), Error);
    const auto full = dft(vec({1, 2, 3}));
    CHECK_THROWS_AS(expand_half_to_full(full), Error);
}

TEST_CASE("expand of the half of a symmetric spectrum is the identity")
{
    Rng rng(14);
    for (int trial = 0; trial < 30; ++trial) {
        const auto n = static_cast<Index>(1 + rng.below(40));
        const auto full = dft(oracle::random_series(rng, n));
        const auto back = expand_half_to_full(to_half(full));
        CHECK((back.values - full.values).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + full.values.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("conjugate symmetry of extended spectra")
{
    Rng rng(15);
    for (int trial = 0; trial < 200; ++trial) {
        const auto l = static_cast<Index>(1 + rng.below(64));
        const auto t = static_cast<Index>(1 + rng.below(64));
        const auto full = dft(zero_pad(oracle::random_series(rng, l), t));
        const Index n = l + t;
        for (Index k = 1; k < n; ++k) {
            CHECK(std::abs(full.values(k) - std::conj(full.values(n - k))) <= 1e-9 * (1.0 + std::abs(full.values(k))));
        }
    }
}

TEST_CASE("round trip through the extended spectrum restores the padded series")
{
    Rng rng(16);
    for (int trial = 0; trial < 200; ++trial) {
        const auto l = static_cast<Index>(1 + rng.below(64));
        const auto t = static_cast<Index>(rng.below(65));
        const RealSeries x = oracle::random_series(rng, l);
        const RealSeries back = idft(expand_half_to_full(extended_dft(x, t)));
        CHECK((back - zero_pad(x, t)).cwiseAbs().maxCoeff() <= 1e-9);
    }
}

TEST_CASE("time-domain energy")
{
    CHECK(energy_time(vec({1, 1})) == 2.0);
    CHECK(energy_time(RealSeries::Zero(5)) == 0.0);
    CHECK(energy_time(vec({3, 4})) == 25.0);
}

TEST_CASE("frequency-domain energy")
{
    CHECK(energy_freq(dft(vec({1, 1}))) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(energy_freq(dft(vec({3, 4}))) == doctest::Approx(50.0).epsilon(1e-15));
    CHECK(energy_freq(ComplexSpectrum{ComplexVector<double>::Zero(3), 3, 3, Layout::Full}) == 0.0);
}

TEST_CASE("Parseval: frequency energy is length times time energy")
{
    Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const auto n = static_cast<Index>(1 + rng.below(128));
        const RealSeries x = oracle::random_series(rng, n, rng.uniform(0.1, 10.0));
        const double ef = energy_freq(dft(x));
        const double et = energy_time(x);
        CHECK(std::abs(ef - static_cast<double>(n) * et) <= 1e-9 * static_cast<double>(n) * et);
    }
}

TEST_CASE("unit roots are exact at quarter turns and mirror across the real axis")
{
    CHECK(unit_root<double>(0, 8) == C(1, 0));
    CHECK(unit_root<double>(2, 8) == C(0, -1));
    CHECK(unit_root<double>(4, 8) == C(-1, 0));
    CHECK(unit_root<double>(6, 8) == C(0, 1));
    for (Index j = 1; j < 13; ++j) {
        CHECK(unit_root<double>(13 - j, 13) == std::conj(unit_root<double>(j, 13)));
    }
    CHECK(unit_root<double>(-1, 8) == unit_root<double>(7, 8));
}
