#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support/oracles.hpp"
#include "support/params.hpp"

#include <atfnet/fblock.hpp>
#include <atfnet/gradcheck_suite.hpp>
#include <atfnet/nn/adam.hpp>

using namespace atfnet;
using testing_params::set_complex;
using Eigen::MatrixXcd;
using Eigen::VectorXd;

namespace {

FBlockConfig tiny(Index lookback = 8, Index horizon = 4)
{
    FBlockConfig c;
    c.lookback = lookback;
    c.horizon = horizon;
    c.model_dim = 4;
    c.head_dim = 4;
    c.heads = 1;
    c.layers = 1;
    c.ffn_dim = 8;
    return c;
}

VectorXd run(const FBlock& block, const nn::ParamStore& store, const VectorXd& x)
{
    ad::Tape tape(false);
    return block.forward(tape, store, tape.constant(x)).value().col(0);
}

} // namespace

TEST_CASE("identity path forecasts the zero padding")
{
    // No encoder layers, embedding and projection pick out one model dimension:
    // the block returns the tail of idft(extended spectrum), which is the padding.
    Rng rng(1);
    for (auto tokenization : {Tokenization::Bins, Tokenization::FullSpectrum}) {
        FBlockConfig cfg = tiny(16, 8);
        cfg.layers = 0;
        cfg.tokenization = tokenization;
        const Index features = tokenization == Tokenization::Bins ? 1 : cfg.spectrum_len();
        cfg.model_dim = features + 3;
        nn::ParamStore store;
        const FBlock block(cfg, store);
        store.initialize(rng);
        set_complex(store, "fblock.embed.weight", MatrixXcd::Identity(features, cfg.model_dim));
        set_complex(store, "fblock.embed.bias", MatrixXcd::Zero(1, cfg.model_dim));
        set_complex(store, "fblock.project.weight", MatrixXcd::Identity(cfg.model_dim, features));
        set_complex(store, "fblock.project.bias", MatrixXcd::Zero(1, features));
        for (int trial = 0; trial < 20; ++trial) {
            const VectorXd y = run(block, store, oracle::random_series(rng, 16, rng.uniform(0.1, 10)));
            REQUIRE(y.size() == 8);
            CHECK(y.cwiseAbs().maxCoeff() < 1e-6);
        }
    }
}

TEST_CASE("zero input gives a finite forecast")
{
    Rng rng(2);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        for (auto tokenization : {Tokenization::Bins, Tokenization::FullSpectrum}) {
            FBlockConfig cfg = tiny();
            cfg.tokenization = tokenization;
            nn::ParamStore store;
            const FBlock block(cfg, store);
            Rng init(seed);
            store.initialize(init);
            for (auto& t : store) {
                for (Index i = 0; i < t.data.size(); ++i) {
                    t.data(i) += rng.uniform(-1, 1);
                }
            }
            CHECK(run(block, store, VectorXd::Zero(8)).allFinite());
        }
    }
}

TEST_CASE("parameter count: hand enumeration")
{
    // embed 1->4: 4 + 4 complex; project 4->1: 4 + 1 complex            -> 13 complex
    // Q, K, V, O: 4 x 16 complex; two norms: 2 x (4 + 4) complex          -> 80 complex
    // FFN 4->8->4: 32 + 8 + 32 + 4 complex                                 -> 76 complex
    // (13 + 80 + 76) x 2 real planes = 338
    const FBlockConfig cfg = tiny();
    CHECK(cfg.spectrum_len() == 7);
    FBlockConfig five = tiny(6, 2);
    CHECK(five.spectrum_len() == 5);
    CHECK(FBlock::param_count(five) == 338);
    CHECK(FBlock::param_count(cfg) == 338); // Bins tokenization does not depend on L-hat
    nn::ParamStore store;
    const FBlock block(five, store);
    CHECK(store.scalar_count() == 338);
}

TEST_CASE("parameter count: M = 0 and linearity in M")
{
    FBlockConfig cfg = tiny();
    cfg.layers = 0;
    CHECK(FBlock::param_count(cfg) == 26);
    cfg.tokenization = Tokenization::FullSpectrum;
    const Index lhat = cfg.spectrum_len();
    CHECK(FBlock::param_count(cfg) == 2 * (lhat * 4 + 4 + 4 * lhat + lhat));

    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        FBlockConfig c = tiny(static_cast<Index>(1 + rng.below(40)), static_cast<Index>(1 + rng.below(20)));
        c.model_dim = static_cast<Index>(1 + rng.below(6));
        c.head_dim = static_cast<Index>(1 + rng.below(4));
        c.heads = static_cast<Index>(1 + rng.below(3));
        c.ffn_dim = static_cast<Index>(1 + rng.below(9));
        c.tokenization = rng.below(2) == 0 ? Tokenization::Bins : Tokenization::FullSpectrum;
        c.layers = 0;
        const Index base = FBlock::param_count(c);
        c.layers = 1;
        const Index one = FBlock::param_count(c);
        for (Index m : {2, 3, 5}) {
            c.layers = m;
            CHECK(FBlock::param_count(c) == base + m * (one - base));
        }
        nn::ParamStore store;
        const FBlock block(c, store);
        CHECK(store.scalar_count() == FBlock::param_count(c));
    }
}

TEST_CASE("output length is the horizon")
{
    Rng rng(4);
    for (int trial = 0; trial < 30; ++trial) {
        FBlockConfig c = tiny(static_cast<Index>(1 + rng.below(40)), static_cast<Index>(1 + rng.below(20)));
        c.tokenization = rng.below(2) == 0 ? Tokenization::Bins : Tokenization::FullSpectrum;
        nn::ParamStore store;
        const FBlock block(c, store);
        store.initialize(rng);
        const VectorXd y = run(block, store, oracle::random_series(rng, c.lookback));
        CHECK(y.size() == c.horizon);
        CHECK(y.allFinite());
    }
}

TEST_CASE("forward is deterministic and checks the window shape")
{
    Rng rng(5);
    nn::ParamStore store;
    const FBlock block(tiny(), store);
    store.initialize(rng);
    const VectorXd x = oracle::random_series(rng, 8);
    CHECK(run(block, store, x) == run(block, store, x));
    ad::Tape tape(false);
    try {
        block.forward(tape, store, tape.constant(VectorXd::Zero(9)));
        FAIL("expected ShapeMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ShapeMismatch);
    }
}

TEST_CASE("single-token tokenization trains")
{
    FBlockConfig cfg = tiny(16, 8);
    cfg.tokenization = Tokenization::FullSpectrum;
    nn::ParamStore store;
    const FBlock block(cfg, store);
    Rng rng(6);
    store.initialize(rng);
    VectorXd x(16);
    VectorXd target(8);
    for (Index n = 0; n < 24; ++n) {
        const double v = std::sin(2.0 * std::numbers::pi * static_cast<double>(n) / 6.0);
        (n < 16 ? x(n) : target(n - 16)) = v;
    }
    nn::Adam adam(nn::AdamConfig{1e-2});
    auto step = [&] {
        ad::Tape tape;
        const ad::Var err = ad::sub(block.forward(tape, store, tape.constant(x)), tape.constant(target));
        const ad::Var loss = ad::mean_all(ad::square(err));
        tape.backward(loss);
        store.zero_grad();
        store.accumulate_grads(tape);
        return loss.value()(0, 0);
    };
    const double first = step();
    double last = first;
    for (int i = 0; i < 200; ++i) {
        adam.step(store);
        last = step();
        REQUIRE(std::isfinite(last));
    }
    MESSAGE("loss " << first << " -> " << last);
    CHECK(last < 0.1 * first);
}

TEST_CASE("block gradcheck at tiny dimensions")
{
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const LayerCheck c = check_layer("fblock", seed);
        CHECK(c.report.max_rel_error < 1e-4);
    }
}
