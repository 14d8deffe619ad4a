#include <atfnet/cvnn.hpp>
#include <atfnet/error.hpp>
#include <atfnet/parallel.hpp>
#include <atfnet/rng.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace atfnet::cvnn {

namespace {

constexpr double kMaxCondition = 1e12;

} // namespace

void ComplexRegressionProblem::validate() const
{
    if (n < 3) {
        throw Error(ErrorCode::InvalidInput, "need at least 3 samples");
    }
    if (!(input_corr >= -1.0 && input_corr <= 1.0)) {
        throw Error(ErrorCode::InvalidInput, "input_corr must lie in [-1, 1]");
    }
    if (!(noise_sigma >= 0.0)) {
        throw Error(ErrorCode::InvalidInput, "noise_sigma must be non-negative");
    }
}

RegressionSample generate(const ComplexRegressionProblem& problem, std::uint64_t seed)
{
    problem.validate();
    Rng rng(seed);
    const double rho = problem.input_corr;
    const double rest = std::sqrt(1.0 - rho * rho);
    const double part_sigma = problem.noise_sigma / std::sqrt(2.0);

    RegressionSample s;
    s.design.resize(problem.n, 2);
    s.response.resize(problem.n);
    for (Index j = 0; j < problem.n; ++j) {
        const double u = rng.normal();
        const double v = rho * u + rest * rng.normal();
        const Complex w{u, v};
        Complex eps{0.0, 0.0};
        if (part_sigma > 0.0) {
            const double er = rng.normal();
            eps = {part_sigma * er, part_sigma * rng.normal()};
        }
        s.design(j, 0) = 1.0;
        s.design(j, 1) = w;
        s.response(j) = problem.beta0 + problem.beta1 * w + eps;
    }
    return s;
}

Eigen::Vector2cd complex_ols(const Eigen::MatrixXcd& design, const Eigen::VectorXcd& response)
{
    if (design.cols() != 2 || design.rows() != response.size()) {
        throw Error(ErrorCode::ShapeMismatch, "design must be [n, 2] with n responses");
    }
    const Eigen::Matrix2cd gram = design.adjoint() * design;
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> eig(gram, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues()(0);
    const double hi = eig.eigenvalues()(1);
    if (!(lo > 0.0) || hi / lo >= kMaxCondition) {
        throw Error(ErrorCode::SingularDesign, "W^H W is singular or too ill-conditioned");
    }
    return gram.ldlt().solve(design.adjoint() * response);
}

namespace {

Eigen::Vector2d real_ols(const Eigen::VectorXd& x, const Eigen::VectorXd& y)
{
    Eigen::MatrixXd design(x.size(), 2);
    design.col(0).setOnes();
    design.col(1) = x;
    const Eigen::Matrix2d gram = design.transpose() * design;
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(gram, Eigen::EigenvaluesOnly);
    if (!(eig.eigenvalues()(0) > 0.0) || eig.eigenvalues()(1) / eig.eigenvalues()(0) >= kMaxCondition) {
        throw Error(ErrorCode::SingularDesign, "real design is singular or too ill-conditioned");
    }
    return gram.ldlt().solve(design.transpose() * y);
}

} // namespace

SplitEstimate split_real_ols(const Eigen::MatrixXcd& design, const Eigen::VectorXcd& response)
{
    if (design.cols() != 2 || design.rows() != response.size()) {
        throw Error(ErrorCode::ShapeMismatch, "design must be [n, 2] with n responses");
    }
    return {real_ols(design.col(1).real(), response.real()), real_ols(design.col(1).imag(), response.imag())};
}

double median(std::vector<double> values)
{
    if (values.empty()) {
        throw Error(ErrorCode::InvalidInput, "median of nothing");
    }
    const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
    std::nth_element(values.begin(), mid, values.end());
    if (values.size() % 2 == 1) {
        return *mid;
    }
    return 0.5 * (*mid + *std::max_element(values.begin(), mid));
}

std::vector<ConsistencyRow> consistency_report(ComplexRegressionProblem problem, const std::vector<Index>& sizes,
                                               Index trials, std::uint64_t seed)
{
    if (trials < 1) {
        throw Error(ErrorCode::InvalidInput, "need at least one trial");
    }
    std::vector<ConsistencyRow> rows;
    for (Index n : sizes) {
        problem.n = n;
        problem.validate();
        const auto count = static_cast<std::size_t>(trials);
        std::vector<double> c_err(count), s_err(count), g_bias(count), d_bias(count);
        parallel_for(count, [&](std::size_t t) {
            const RegressionSample s =
                generate(problem, derive_seed(seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(t)));
            const Eigen::Vector2cd beta = complex_ols(s.design, s.response);
            const SplitEstimate split = split_real_ols(s.design, s.response);
            c_err[t] = std::abs(beta(1) - problem.beta1);
            s_err[t] = std::abs(split.gamma(1) - problem.beta1.real());
            g_bias[t] = split.gamma(1) - problem.beta1.real();
            d_bias[t] = split.delta(1) - problem.beta1.real();
        });
        rows.push_back({n, trials, median(c_err), median(s_err), median(g_bias), median(d_bias)});
    }
    return rows;
}

std::string consistency_csv(const std::vector<ConsistencyRow>& rows)
{
    std::ostringstream out;
    out.precision(17);
    out << kConsistencyHeader << '\n';
    for (const auto& r : rows) {
        out << r.n << ',' << r.trials << ',' << r.complex_error << ',' << r.split_error << ',' << r.split_gamma_bias
            << ',' << r.split_delta_bias << '\n';
    }
    return out.str();
}

} // namespace atfnet::cvnn
