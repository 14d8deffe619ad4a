#include <atfnet/error.hpp>
#include <atfnet/nn/gradcheck.hpp>

#include <algorithm>
#include <cmath>

namespace atfnet::nn {

namespace {

double evaluate(const LossBuilder& loss)
{
    ad::Tape tape(false);
    return loss(tape).value()(0, 0);
}

} // namespace

GradcheckReport gradcheck(const LossBuilder& loss, const std::vector<ParamStore*>& stores, double tolerance,
                          double step)
{
    for (ParamStore* s : stores) {
        s->zero_grad();
    }
    {
        ad::Tape tape;
        const ad::Var root = loss(tape);
        tape.backward(root);
        for (ParamStore* s : stores) {
            s->accumulate_grads(tape);
        }
    }

    GradcheckReport report;
    report.tolerance = tolerance;
    for (ParamStore* s : stores) {
        for (ParamTensor& t : *s) {
            for (Index i = 0; i < t.data.size(); ++i) {
                const double saved = t.data(i);
                t.data(i) = saved + step;
                const double up = evaluate(loss);
                t.data(i) = saved - step;
                const double down = evaluate(loss);
                t.data(i) = saved;

                const double numeric = (up - down) / (2.0 * step);
                const double analytic = t.grad(i);
                const double err =
                    std::abs(analytic - numeric) / std::max(1e-8, std::abs(analytic) + std::abs(numeric));
                ++report.checked;
                if (err > report.max_rel_error || report.worst_index < 0) {
                    report.max_rel_error = err;
                    report.worst_name = t.name;
                    report.worst_index = i;
                    report.worst_analytic = analytic;
                    report.worst_numeric = numeric;
                }
            }
        }
    }
    report.passed = report.max_rel_error < tolerance;
    return report;
}

GradcheckReport require_gradcheck(const LossBuilder& loss, const std::vector<ParamStore*>& stores, double tolerance,
                                  double step)
{
    GradcheckReport report = gradcheck(loss, stores, tolerance, step);
    if (!report.passed) {
        throw Error(ErrorCode::GradcheckFailure,
                    report.worst_name + "[" + std::to_string(report.worst_index) + "] analytic " +
                        std::to_string(report.worst_analytic) + " vs numeric " +
                        std::to_string(report.worst_numeric) + " (rel err " + std::to_string(report.max_rel_error) +
                        ")");
    }
    return report;
}

ad::Var random_projection(const ad::Var& out, std::uint64_t seed)
{
    Rng rng(seed);
    Matrix weights(out.rows(), out.cols());
    for (Index i = 0; i < weights.size(); ++i) {
        weights(i) = rng.uniform(-1.0, 1.0);
    }
    return ad::sum_all(ad::hadamard(out, out.tape().constant(std::move(weights))));
}

ad::Var random_projection(const ad::CVar& out, std::uint64_t seed)
{
    return ad::add(random_projection(out.re, seed), random_projection(out.im, seed + 0x9e3779b97f4a7c15ULL));
}

} // namespace atfnet::nn
