#pragma once

#include <atfnet/nn/params.hpp>

#include <functional>
#include <string>
#include <vector>

namespace atfnet::nn {

/// Builds a graph on the given tape and returns a scalar loss.
using LossBuilder = std::function<ad::Var(ad::Tape&)>;

struct GradcheckReport {
    double max_rel_error = 0.0;
    std::string worst_name;
    Index worst_index = -1;
    double worst_analytic = 0.0;
    double worst_numeric = 0.0;
    Index checked = 0;
    double tolerance = 0.0;
    bool passed = true;
};

/// Central finite differences (step h) on every scalar of every store,
/// compared with the tape's gradient. Relative error per scalar is
/// |a - n| / max(1e-8, |a| + |n|); passes iff the maximum is below tolerance.
GradcheckReport gradcheck(const LossBuilder& loss, const std::vector<ParamStore*>& stores,
                          double tolerance = 1e-5, double step = 1e-6);

/// As gradcheck, but throws GradcheckFailure naming the worst scalar.
GradcheckReport require_gradcheck(const LossBuilder& loss, const std::vector<ParamStore*>& stores,
                                  double tolerance = 1e-5, double step = 1e-6);

/// sum(out .* R) for a fixed pseudo-random R; turns any output into a scalar
/// whose gradient exercises every output entry.
ad::Var random_projection(const ad::Var& out, std::uint64_t seed);
ad::Var random_projection(const ad::CVar& out, std::uint64_t seed);

} // namespace atfnet::nn
