#pragma once

// Reverse-mode differentiation over dense real matrices. A Tape records every
// intermediate value together with a closure that pushes the incoming
// gradient to its parents. Complex quantities are carried as (re, im) pairs
// of real nodes, see complex.hpp.

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <vector>

namespace atfnet::ad {

using Matrix = Eigen::MatrixXd;
using Eigen::Index;

class Tape;

/// Handle to one recorded node.
class Var {
public:
    Var() = default;
    Var(Tape* tape, int id) : tape_(tape), id_(id) {}

    const Matrix& value() const;
    Index rows() const { return value().rows(); }
    Index cols() const { return value().cols(); }

    Tape& tape() const { return *tape_; }
    int id() const { return id_; }
    bool valid() const { return tape_ != nullptr; }

private:
    Tape* tape_ = nullptr;
    int id_ = -1;
};

/// Identifies which stored tensor a parameter leaf was read from.
/// plane: -1 for real tensors, 0/1 for the real/imaginary plane of a complex one.
struct ParamRef {
    const void* owner = nullptr;
    std::size_t index = 0;
    int plane = -1;
};

class Tape {
public:
    using Backward = std::function<void(Tape&, const Matrix& grad_out)>;

    explicit Tape(bool grad_enabled = true) : grad_enabled_(grad_enabled) {}
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    bool grad_enabled() const { return grad_enabled_; }

    Var constant(Matrix value);
    Var parameter(Matrix value, ParamRef ref);
    Var record(Matrix value, std::initializer_list<Var> parents, Backward backward);
    Var record(Matrix value, const std::vector<Var>& parents, Backward backward);

    const Matrix& value(int id) const { return nodes_[static_cast<std::size_t>(id)].value; }
    bool requires_grad(int id) const { return nodes_[static_cast<std::size_t>(id)].requires_grad; }

    /// Gradient buffer of a node, zero-initialised on first access.
    Matrix& grad(int id);
    bool has_grad(int id) const { return nodes_[static_cast<std::size_t>(id)].grad_ready; }

    /// Seeds d(root)/d(root) = 1 and sweeps the tape backwards. root must be 1x1.
    void backward(const Var& root);

    /// Calls fn(ref, grad) for every parameter leaf that received a gradient.
    void for_each_parameter_grad(const std::function<void(const ParamRef&, const Matrix&)>& fn) const;

    std::size_t size() const { return nodes_.size(); }

private:
    template <typename Range>
    Var record_from(Matrix value, const Range& parents, Backward backward);

    struct Node {
        Matrix value;
        Matrix grad;
        Backward backward;
        ParamRef param;
        bool grad_ready = false;
        bool requires_grad = false;
        bool is_parameter = false;
    };

    std::vector<Node> nodes_;
    bool grad_enabled_;
};

inline const Matrix& Var::value() const { return tape_->value(id_); }

} // namespace atfnet::ad
