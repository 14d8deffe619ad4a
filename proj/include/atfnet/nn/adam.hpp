#pragma once

#include <atfnet/nn/params.hpp>

#include <vector>

namespace atfnet::nn {

struct AdamConfig {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Moment buffers for one flat parameter vector.
struct AdamMoments {
    Eigen::VectorXd m;
    Eigen::VectorXd v;
};

/// One bias-corrected Adam update of `params` in place. `step` counts from 1.
void adam_step(Eigen::Ref<Eigen::VectorXd> params, const Eigen::Ref<const Eigen::VectorXd>& grads,
               AdamMoments& moments, const AdamConfig& config, long step);

/// Adam over every tensor of a ParamStore; complex planes are independent reals.
class Adam {
public:
    explicit Adam(AdamConfig config = {}) : config_(config) {}

    void step(ParamStore& store);

    long steps_taken() const { return step_; }
    const AdamConfig& config() const { return config_; }

private:
    AdamConfig config_;
    std::vector<AdamMoments> moments_;
    long step_ = 0;
};

} // namespace atfnet::nn
