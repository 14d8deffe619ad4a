#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support/oracles.hpp"
#include "support/params.hpp"

#include <atfnet/gradcheck_suite.hpp>
#include <atfnet/tblock.hpp>

using namespace atfnet;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

TBlockConfig tiny(Index lookback = 16, Index horizon = 4)
{
    TBlockConfig c;
    c.lookback = lookback;
    c.horizon = horizon;
    c.patch_len = 8;
    c.stride = 4;
    c.model_dim = 4;
    c.heads = 2;
    c.layers = 1;
    c.ffn_dim = 8;
    return c;
}

VectorXd run(const TBlock& block, const nn::ParamStore& store, const VectorXd& x)
{
    ad::Tape tape(false);
    return block.forward(tape, store, tape.constant(x)).value().col(0);
}

} // namespace

TEST_CASE("patches without overlap")
{
    const VectorXd x = VectorXd::LinSpaced(8, 1, 8);
    MatrixXd expected(2, 4);
    expected << 1, 2, 3, 4, 5, 6, 7, 8;
    CHECK(make_patches(x, 4, 4) == expected);
}

TEST_CASE("overlapping patches")
{
    const MatrixXd p = make_patches(VectorXd::LinSpaced(8, 1, 8), 4, 2);
    REQUIRE(p.rows() == 3);
    CHECK(p.row(1) == (Eigen::RowVectorXd(4) << 3, 4, 5, 6).finished());
    CHECK(p.row(2) == (Eigen::RowVectorXd(4) << 5, 6, 7, 8).finished());
}

TEST_CASE("patch the length of the series")
{
    const VectorXd x = VectorXd::LinSpaced(5, -1, 1);
    const MatrixXd p = make_patches(x, 5, 3);
    REQUIRE(p.rows() == 1);
    CHECK(p.row(0).transpose() == x);
}

TEST_CASE("patch longer than the series")
{
    try {
        make_patches(VectorXd::Zero(4), 5, 1);
        FAIL("expected PatchTooLong");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::PatchTooLong);
    }
    TBlockConfig c = tiny();
    c.patch_len = 17;
    try {
        c.validate();
        FAIL("expected PatchTooLong");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::PatchTooLong);
    }
}

TEST_CASE("patch count matches enumeration")
{
    for (Index l = 1; l <= 32; ++l) {
        for (Index p = 1; p <= l; ++p) {
            for (Index s = 1; s <= 32; ++s) {
                Index count = 0;
                for (Index start = 0; start + p <= l; start += s) {
                    ++count;
                }
                TBlockConfig c = tiny(l);
                c.patch_len = p;
                c.stride = s;
                CHECK(c.num_patches() == count);
                const MatrixXd patches = make_patches(VectorXd::LinSpaced(l, 0, static_cast<double>(l - 1)), p, s);
                REQUIRE(patches.rows() == count);
                for (Index j = 0; j < count; ++j) {
                    CHECK(patches(j, 0) == static_cast<double>(j * s));
                }
            }
        }
    }
}

TEST_CASE("constant input is forecast as the constant")
{
    Rng rng(1);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        nn::ParamStore store;
        const TBlock block(tiny(), store);
        Rng init(seed);
        store.initialize(init);
        const double c = rng.uniform(-100, 100);
        const VectorXd y = run(block, store, VectorXd::Constant(16, c));
        CHECK((y.array() - c).abs().maxCoeff() < 1e-3);
    }
}

TEST_CASE("zero head forecasts the window mean")
{
    Rng rng(2);
    nn::ParamStore store;
    const TBlock block(tiny(), store);
    store.initialize(rng);
    testing_params::zero_matching(store, "tblock.head");
    for (int trial = 0; trial < 10; ++trial) {
        const VectorXd x = oracle::random_series(rng, 16, 3.0) + VectorXd::Constant(16, rng.uniform(-5, 5));
        long double mean = 0;
        for (Index i = 0; i < 16; ++i) {
            mean += x(i);
        }
        mean /= 16;
        const VectorXd y = run(block, store, x);
        CHECK((y.array() - static_cast<double>(mean)).abs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("parameter count")
{
    // embed 8*4+4, position 3*4, layer (4*(16+4) + 2*2*4 + 4*8+8+8*4+4), head 12*4+4
    CHECK(TBlock::param_count(tiny()) == 36 + 12 + (80 + 16 + 76) + 52);
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        TBlockConfig c = tiny(static_cast<Index>(4 + rng.below(40)), static_cast<Index>(1 + rng.below(10)));
        c.patch_len = static_cast<Index>(1 + rng.below(static_cast<std::uint64_t>(c.lookback)));
        c.stride = static_cast<Index>(1 + rng.below(8));
        c.heads = static_cast<Index>(1 + rng.below(3));
        c.model_dim = c.heads * static_cast<Index>(1 + rng.below(3));
        c.layers = static_cast<Index>(rng.below(3));
        nn::ParamStore store;
        const TBlock block(c, store);
        CHECK(store.scalar_count() == TBlock::param_count(c));
        store.initialize(rng);
        const VectorXd y = run(block, store, oracle::random_series(rng, c.lookback));
        CHECK(y.size() == c.horizon);
        CHECK(y.allFinite());
    }
}

TEST_CASE("real attention rows sum to one")
{
    Rng rng(4);
    nn::EncoderLayerConfig cfg = tiny().encoder();
    nn::ParamStore store;
    const nn::MultiHeadAttention attention(store, "mha", cfg);
    for (int trial = 0; trial < 30; ++trial) {
        store.initialize(rng);
        ad::Tape tape(false);
        std::vector<ad::Var> weights;
        const MatrixXd tokens = oracle::random_matrix(rng, static_cast<long>(1 + rng.below(20)), 4) * 10.0;
        attention.forward(tape, store, tape.constant(tokens), &weights);
        for (const auto& a : weights) {
            CHECK(a.value().minCoeff() >= 0.0);
            CHECK((a.value().rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);
        }
    }
}

TEST_CASE("forward is deterministic")
{
    Rng rng(5);
    nn::ParamStore store;
    const TBlock block(tiny(), store);
    store.initialize(rng);
    const VectorXd x = oracle::random_series(rng, 16);
    CHECK(run(block, store, x) == run(block, store, x));
}

TEST_CASE("block gradcheck at tiny dimensions")
{
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        CHECK(check_layer("tblock", seed).report.max_rel_error < 1e-4);
    }
}
