#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support/oracles.hpp"

#include <atfnet/data.hpp>
#include <atfnet/error.hpp>

#include <filesystem>
#include <fstream>
#include <unistd.h>

using namespace atfnet;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

std::filesystem::path write_file(const std::string& name, const std::string& text)
{
    const auto path = std::filesystem::temp_directory_path() / ("atfnet_data_" + std::to_string(::getpid()) + "_" + name);
    std::ofstream(path) << text;
    return path;
}

template <typename Fn>
Error error_of(Fn&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e;
    }
    FAIL("expected an atfnet::Error");
    return Error(ErrorCode::InvalidInput, "");
}

Dataset random_dataset(Rng& rng, Index rows, Index channels, SplitFractions split = {})
{
    MatrixXd raw(rows, channels);
    for (Index i = 0; i < raw.size(); ++i) {
        raw(i) = rng.normal() * 3.0 + 10.0;
    }
    std::vector<std::string> names;
    for (Index c = 0; c < channels; ++c) {
        names.push_back("c" + std::to_string(c));
    }
    return make_dataset(raw, names, split);
}

} // namespace

TEST_CASE("three-row CSV")
{
    const auto path = write_file("three.csv", "date,OT,HUFL\n"
                                              "2016-07-01 00:00:00,1.5,-2\n"
                                              "2016-07-01 01:00:00,2.5,0.25\n"
                                              "\n"
                                              "2016-07-01 02:00:00,4,1e3\n");
    const Dataset d = load_csv(path);
    MatrixXd expected(3, 2);
    expected << 1.5, -2, 2.5, 0.25, 4, 1000;
    CHECK(d.raw == expected);
    CHECK(d.channel_names == std::vector<std::string>{"OT", "HUFL"});
    CHECK(d.train_end == 2);
    CHECK(d.norm_stats[0].mean == 2.0);
    CHECK(d.norm_stats[0].std == 0.5);
    CHECK(d.values(2, 0) == 4.0);
    std::filesystem::remove(path);
}

TEST_CASE("NaN, inf and text cells are parse errors with a location")
{
    const std::string header = "date,a,b\n";
    for (const std::string bad : {"NaN", "nan", "inf", "-Infinity", "abc", "", "1.0x"}) {
        const auto path = write_file("bad.csv", header + "t0,1,2\nt1,3,4\nt2,5," + bad + "\nt3,7,8\n");
        const Error e = error_of([&] { load_csv(path); });
        CHECK(e.code() == ErrorCode::ParseError);
        CHECK(std::string(e.what()).find("row 4, column 3") != std::string::npos);
        std::filesystem::remove(path);
    }
    const auto ragged = write_file("ragged.csv", header + "t0,1,2\nt1,3\n");
    CHECK(error_of([&] { load_csv(ragged); }).code() == ErrorCode::ParseError);
    std::filesystem::remove(ragged);
    const auto no_channels = write_file("nochan.csv", "date\nt0\nt1\n");
    CHECK(error_of([&] { load_csv(no_channels); }).code() == ErrorCode::ParseError);
    std::filesystem::remove(no_channels);
    CHECK(error_of([] { load_csv("/nonexistent/file.csv"); }).code() == ErrorCode::Io);
}

TEST_CASE("constant channel")
{
    const auto path = write_file("const.csv", "date,a,flat\nt0,1,5\nt1,2,5\nt2,3,5\nt3,4,5\n");
    const Error e = error_of([&] { load_csv(path); });
    CHECK(e.code() == ErrorCode::ConstantChannel);
    CHECK(std::string(e.what()).find("flat") != std::string::npos);
    std::filesystem::remove(path);
}

TEST_CASE("too short")
{
    MatrixXd raw(10, 1);
    raw.col(0) = VectorXd::LinSpaced(10, 0, 9);
    CHECK(error_of([&] { make_dataset(raw, {"x"}, {}, 11); }).code() == ErrorCode::TooShort);
    CHECK(error_of([&] { make_dataset(raw.topRows(2), {"x"}); }).code() == ErrorCode::TooShort);
    CHECK(make_dataset(raw, {"x"}, {}, 10).rows() == 10);
}

TEST_CASE("split fractions")
{
    CHECK_NOTHROW(SplitFractions{}.validate());
    CHECK(error_of([] { SplitFractions{0.5, 0.2, 0.2}.validate(); }).code() == ErrorCode::InvalidInput);
    CHECK(error_of([] { SplitFractions{0.0, 0.5, 0.5}.validate(); }).code() == ErrorCode::InvalidInput);
    CHECK(error_of([] { SplitFractions{1.2, -0.1, -0.1}.validate(); }).code() == ErrorCode::InvalidInput);
    CHECK(parse_split_part("val") == SplitPart::Val);
    CHECK(to_string(SplitPart::Test) == "test");
    CHECK(error_of([] { parse_split_part("holdout"); }).code() == ErrorCode::InvalidInput);

    Rng rng(1);
    const Dataset d = random_dataset(rng, 1000, 1);
    CHECK(d.range(SplitPart::Train) == std::pair<Index, Index>{0, 700});
    CHECK(d.range(SplitPart::Val) == std::pair<Index, Index>{700, 800});
    CHECK(d.range(SplitPart::Test) == std::pair<Index, Index>{800, 1000});
}

TEST_CASE("window counts")
{
    CHECK(window_count(10, 4, 2) == 5);
    CHECK(window_count(5, 4, 2) == 0);
    CHECK(window_count(6, 4, 2) == 1);
    CHECK(error_of([] { window_count(10, 4, 2, 0); }).code() == ErrorCode::InvalidInput);
    for (Index len = 0; len <= 40; ++len) {
        for (Index l = 1; l <= 10; ++l) {
            for (Index t = 1; t <= 6; ++t) {
                for (Index stride = 1; stride <= 5; ++stride) {
                    Index brute = 0;
                    for (Index origin = 0; origin + l + t <= len; origin += stride) {
                        ++brute;
                    }
                    CHECK(window_count(len, l, t, stride) == brute);
                }
            }
        }
    }
}

TEST_CASE("windows stay inside their part")
{
    Rng rng(2);
    for (Index rows : {40, 57, 100}) {
        const Dataset d = random_dataset(rng, rows, 2, {0.6, 0.2, 0.2});
        for (auto part : {SplitPart::Train, SplitPart::Val, SplitPart::Test}) {
            const auto [first, last] = d.range(part);
            for (Index l : {2, 5, 8}) {
                for (Index t : {1, 3}) {
                    for (Index stride : {1, 3}) {
                        const auto ws = windows(d, l, t, part, stride);
                        CHECK(static_cast<Index>(ws.size()) == 2 * window_count(last - first, l, t, stride));
                        for (std::size_t i = 0; i < ws.size(); ++i) {
                            const SeriesWindow& w = ws[i];
                            CHECK(w.origin >= first);
                            CHECK(w.origin + l + t <= last);
                            CHECK((w.origin - first) % stride == 0);
                            CHECK(w.lookback == d.values.col(w.channel).segment(w.origin, l));
                            CHECK(w.target == d.values.col(w.channel).segment(w.origin + l, t));
                            if (i > 0) {
                                const SeriesWindow& prev = ws[i - 1];
                                CHECK((prev.channel < w.channel || (prev.channel == w.channel && prev.origin < w.origin)));
                            }
                        }
                    }
                }
            }
        }
    }
}

TEST_CASE("train slice is standardised")
{
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const Dataset d = random_dataset(rng, static_cast<Index>(20 + rng.below(300)), 3);
        for (Index c = 0; c < 3; ++c) {
            const VectorXd train = d.values.col(c).head(d.train_end);
            long double sum = 0;
            long double sq = 0;
            for (Index i = 0; i < train.size(); ++i) {
                sum += train(i);
            }
            const long double mean = sum / train.size();
            for (Index i = 0; i < train.size(); ++i) {
                sq += (train(i) - mean) * (train(i) - mean);
            }
            CHECK(std::abs(static_cast<double>(mean)) < 1e-9);
            CHECK(std::abs(static_cast<double>(std::sqrt(sq / train.size())) - 1.0) < 1e-9);
            // later slices use the same statistics
            const NormStats s = d.norm_stats[static_cast<std::size_t>(c)];
            CHECK(d.values(d.rows() - 1, c) == doctest::Approx((d.raw(d.rows() - 1, c) - s.mean) / s.std));
        }
    }
}

TEST_CASE("CSV write and read back")
{
    Rng rng(4);
    MatrixXd values(30, 2);
    for (Index i = 0; i < values.size(); ++i) {
        values(i) = rng.normal() * std::pow(10.0, rng.uniform(-8, 8));
    }
    const auto path = write_file("roundtrip.csv", "");
    write_csv(path, {"a", "b"}, values);
    const Dataset d = load_csv(path);
    CHECK(d.raw == values);
    std::ifstream in(path);
    std::string header;
    std::string first;
    std::getline(in, header);
    std::getline(in, first);
    CHECK(header == "date,a,b");
    CHECK(first.starts_with("2000-01-01T00:00:00,"));
    std::filesystem::remove(path);
}

TEST_CASE("hourly timestamps")
{
    CHECK(iso_timestamp(0) == "2000-01-01T00:00:00");
    CHECK(iso_timestamp(23) == "2000-01-01T23:00:00");
    CHECK(iso_timestamp(24) == "2000-01-02T00:00:00");
    CHECK(iso_timestamp(59 * 24 + 5) == "2000-02-29T05:00:00");
    CHECK(iso_timestamp(366 * 24) == "2001-01-01T00:00:00");
}

TEST_CASE("decomposition at lambda 9")
{
    const PeriodicDecomposition d = synth_decomposition(8, 4, 9.0, 7);
    long double ep = 0;
    long double er = 0;
    for (Index i = 0; i < 32; ++i) {
        ep += static_cast<long double>(d.periodic_part(i)) * d.periodic_part(i);
        er += static_cast<long double>(d.residual_part(i)) * d.residual_part(i);
    }
    CHECK(std::abs(static_cast<double>(ep / er) - 9.0) < 1e-9);
    CHECK(std::abs(d.lambda - 9.0) < 1e-9);
}

TEST_CASE("decomposition invariants")
{
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const auto tau = static_cast<Index>(3 + rng.below(14));
        const auto reps = static_cast<Index>(1 + rng.below(8));
        const double lambda = std::exp(rng.uniform(std::log(0.05), std::log(500.0)));
        const PeriodicDecomposition d = synth_decomposition(tau, reps, lambda, derive_seed(5, static_cast<std::uint64_t>(trial)));
        const Index l = tau * reps;
        REQUIRE(d.periodic_part.size() == l);
        REQUIRE(d.residual_part.size() == l);
        CHECK(d.period == tau);
        CHECK(d.repetitions == reps);
        for (Index x = tau; x < l; ++x) {
            CHECK(d.periodic_part(x) == d.periodic_part(x - tau));
        }
        CHECK(std::abs(d.combined().sum()) < 1e-9);
        CHECK(std::abs(d.periodic_part.squaredNorm() / d.residual_part.squaredNorm() - lambda) < 1e-9 * lambda);

        // Fourier content of one period sits at harmonics 1..q, q = ceil(tau/2) - 1
        const Index q = (tau + 1) / 2 - 1;
        const auto f = oracle::dft(VectorXd(d.periodic_part.head(tau)));
        long double total = 0;
        long double outside = 0;
        for (Index m = 0; m < tau; ++m) {
            const long double e = std::norm(f[static_cast<std::size_t>(m)]);
            total += e;
            const Index folded = std::min(m, tau - m);
            if (folded == 0 || folded > q) {
                outside += e;
            }
        }
        CHECK(static_cast<double>(outside / total) < 1e-20);
    }
}

TEST_CASE("decomposition rejects bad arguments")
{
    CHECK(error_of([] { synth_decomposition(8, 4, 0.0, 1); }).code() == ErrorCode::InvalidInput);
    CHECK(error_of([] { synth_decomposition(8, 4, -1.0, 1); }).code() == ErrorCode::InvalidInput);
    CHECK(error_of([] { synth_decomposition(8, 4, std::nan(""), 1); }).code() == ErrorCode::InvalidInput);
    CHECK(error_of([] { synth_decomposition(2, 4, 1.0, 1); }).code() == ErrorCode::InvalidInput);
    CHECK(error_of([] { synth_decomposition(8, 0, 1.0, 1); }).code() == ErrorCode::InvalidInput);
}

TEST_CASE("noiseless tone has all weight on the frequency branch")
{
    for (double period : {4.0, 6.0, 8.0, 12.0, 24.0}) {
        const VectorXd x = synth_tone(96, period, 3.0, 0.4);
        CHECK(harmonic_weights(x).w_f == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("generators are deterministic per seed")
{
    CHECK(synth_tone(50, 7, 1, 0, 0.5, 3) == synth_tone(50, 7, 1, 0, 0.5, 3));
    CHECK(synth_tone(50, 7, 1, 0, 0.5, 3) != synth_tone(50, 7, 1, 0, 0.5, 4));
    CHECK(synth_noise(50, 1, 9) == synth_noise(50, 1, 9));
    CHECK(synth_noise(50, 1, 9) != synth_noise(50, 1, 10));
    const PeriodicDecomposition a = synth_decomposition(6, 3, 2.0, 5);
    const PeriodicDecomposition b = synth_decomposition(6, 3, 2.0, 5);
    CHECK(a.periodic_part == b.periodic_part);
    CHECK(a.residual_part == b.residual_part);

    const VectorXd clean = synth_tone(40, 10, 2.0, 0.5);
    for (Index n = 0; n < 40; ++n) {
        CHECK(clean(n) == doctest::Approx(2.0 * std::sin(2.0 * std::numbers::pi * n / 10.0 + 0.5)).epsilon(1e-14));
    }
    const VectorXd noise = synth_noise(20000, 2.0, 1);
    CHECK(std::abs(noise.mean()) < 0.05);
    CHECK(std::sqrt((noise.array() - noise.mean()).square().mean()) == doctest::Approx(2.0).epsilon(0.03));
}
