#pragma once

#include <atfnet/config.hpp>

namespace testing_configs {

/// Small enough for many forward passes per test.
inline atfnet::AtfnetConfig small(Eigen::Index lookback = 24, Eigen::Index horizon = 8)
{
    atfnet::AtfnetConfig c;
    c.lookback = lookback;
    c.horizon = horizon;
    c.fblock.model_dim = 4;
    c.fblock.head_dim = 2;
    c.fblock.heads = 2;
    c.fblock.layers = 1;
    c.fblock.ffn_dim = 8;
    c.tblock.patch_len = 8;
    c.tblock.stride = 4;
    c.tblock.model_dim = 4;
    c.tblock.heads = 2;
    c.tblock.layers = 1;
    c.tblock.ffn_dim = 8;
    c.sync();
    return c;
}

} // namespace testing_configs
