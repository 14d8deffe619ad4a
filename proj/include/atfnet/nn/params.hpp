#pragma once

#include <atfnet/ad/complex.hpp>
#include <atfnet/rng.hpp>

#include <Eigen/Core>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace atfnet::nn {

using Eigen::Index;
using ad::Matrix;

enum class InitRule {
    FanIn,      ///< uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)]
    Zero,       ///< biases, LayerNorm shifts
    One,        ///< LayerNorm gains (real part 1, imaginary part 0)
    Positional, ///< uniform in [-0.02, 0.02]
};

/// A named array of real scalars with a matching gradient buffer.
///
/// Storage is row-major. A complex tensor carries a trailing axis of size 2
/// holding interleaved (real, imaginary) pairs, so shape {in, out, 2} is an
/// in x out complex matrix and {n, 2} a length-n complex row.
struct ParamTensor {
    std::string name;
    std::vector<Index> shape;
    bool is_complex = false;
    Eigen::VectorXd data;
    Eigen::VectorXd grad;
    InitRule init = InitRule::Zero;
    Index fan_in = 1;

    Index rows() const;
    Index cols() const;

    /// Real plane (plane -1 for real tensors, 0/1 for re/im) as a rows x cols matrix.
    Matrix plane(int which) const;
    void add_grad(int which, const Matrix& g);
};

class ParamStore {
public:
    std::size_t add(std::string name, std::vector<Index> shape, bool is_complex, InitRule init, Index fan_in = 1);

    ParamTensor& operator[](std::size_t i) { return tensors_[i]; }
    const ParamTensor& operator[](std::size_t i) const { return tensors_[i]; }
    std::size_t size() const { return tensors_.size(); }
    std::optional<std::size_t> find(const std::string& name) const;

    auto begin() { return tensors_.begin(); }
    auto end() { return tensors_.end(); }
    auto begin() const { return tensors_.begin(); }
    auto end() const { return tensors_.end(); }

    /// Total number of real scalars.
    Index scalar_count() const;

    void initialize(Rng& rng);
    void zero_grad();
    /// Adds the gradients that `tape` holds for leaves bound from this store.
    void accumulate_grads(const ad::Tape& tape);

    ad::Var real(ad::Tape& tape, std::size_t i) const;
    ad::CVar complex(ad::Tape& tape, std::size_t i) const;

    bool all_finite() const;

private:
    std::vector<ParamTensor> tensors_;
};

} // namespace atfnet::nn
