#include <atfnet/error.hpp>
#include <atfnet/nn/adam.hpp>

#include <cmath>

namespace atfnet::nn {

void adam_step(Eigen::Ref<Eigen::VectorXd> params, const Eigen::Ref<const Eigen::VectorXd>& grads,
               AdamMoments& moments, const AdamConfig& config, long step)
{
    if (moments.m.size() != params.size()) {
        moments.m = Eigen::VectorXd::Zero(params.size());
        moments.v = Eigen::VectorXd::Zero(params.size());
    }
    moments.m = config.beta1 * moments.m + (1.0 - config.beta1) * grads;
    moments.v = config.beta2 * moments.v + (1.0 - config.beta2) * grads.cwiseAbs2();

    const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(step));
    const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(step));
    params.array() -= config.lr * (moments.m.array() / c1) / ((moments.v.array() / c2).sqrt() + config.eps);
}

void Adam::step(ParamStore& store)
{
    if (moments_.size() != store.size()) {
        moments_.assign(store.size(), AdamMoments{});
    }
    ++step_;
    for (std::size_t i = 0; i < store.size(); ++i) {
        adam_step(store[i].data, store[i].grad, moments_[i], config_, step_);
    }
    if (!store.all_finite()) {
        throw Error(ErrorCode::NonFiniteLoss, "parameters became non-finite after Adam step " + std::to_string(step_));
    }
}

} // namespace atfnet::nn
