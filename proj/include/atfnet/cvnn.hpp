#pragma once

#include <Eigen/Core>

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace atfnet::cvnn {

using Eigen::Index;
using Complex = std::complex<double>;

/// z = beta0 + beta1 * w + eps with Gaussian w whose real and imaginary
/// parts have correlation input_corr, and complex Gaussian eps whose parts
/// each have standard deviation noise_sigma / sqrt(2).
struct ComplexRegressionProblem {
    Complex beta0{0.0, 0.0};
    Complex beta1{1.0, 0.0};
    Index n = 1000;
    double input_corr = 0.0;
    double noise_sigma = 1.0;

    void validate() const;
};

struct RegressionSample {
    /// [n, 2]: a column of ones, then w.
    Eigen::MatrixXcd design;
    Eigen::VectorXcd response;
};

RegressionSample generate(const ComplexRegressionProblem& problem, std::uint64_t seed);

/// Solves (W^H W) beta = W^H z. Throws SingularDesign when W^H W has a
/// condition number of 1e12 or more.
Eigen::Vector2cd complex_ols(const Eigen::MatrixXcd& design, const Eigen::VectorXcd& response);

/// Re(z) regressed on [1, Re(w)] (gamma) and Im(z) on [1, Im(w)] (delta),
/// each by ordinary real least squares. Both slopes estimate Re(beta1); the
/// model has no term for Im(beta1).
struct SplitEstimate {
    Eigen::Vector2d gamma;
    Eigen::Vector2d delta;
};

SplitEstimate split_real_ols(const Eigen::MatrixXcd& design, const Eigen::VectorXcd& response);

struct ConsistencyRow {
    Index n = 0;
    Index trials = 0;
    /// Medians over trials of |beta1_hat - beta1| and |gamma1 - Re(beta1)|.
    double complex_error = 0.0;
    double split_error = 0.0;
    /// Medians over trials of gamma1 - Re(beta1) and delta1 - Re(beta1).
    double split_gamma_bias = 0.0;
    double split_delta_bias = 0.0;
};

/// One row per sample size. Trial t at size n uses seed derive_seed(seed, n, t),
/// so rows are reproducible in isolation and independent of worker count.
std::vector<ConsistencyRow> consistency_report(ComplexRegressionProblem problem, const std::vector<Index>& sizes,
                                               Index trials, std::uint64_t seed);

inline constexpr const char* kConsistencyHeader =
    "n,trials,complex_median_error,split_median_error,split_median_gamma1_bias,split_median_delta1_bias";

std::string consistency_csv(const std::vector<ConsistencyRow>& rows);

double median(std::vector<double> values);

} // namespace atfnet::cvnn
