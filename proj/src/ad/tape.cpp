#include <atfnet/ad/tape.hpp>
#include <atfnet/error.hpp>

#include <string>

namespace atfnet::ad {

Var Tape::constant(Matrix value)
{
    Node node;
    node.value = std::move(value);
    nodes_.push_back(std::move(node));
    return {this, static_cast<int>(nodes_.size() - 1)};
}

Var Tape::parameter(Matrix value, ParamRef ref)
{
    Node node;
    node.value = std::move(value);
    node.param = ref;
    node.is_parameter = true;
    node.requires_grad = grad_enabled_;
    nodes_.push_back(std::move(node));
    return {this, static_cast<int>(nodes_.size() - 1)};
}

Var Tape::record(Matrix value, std::initializer_list<Var> parents, Backward backward)
{
    return record_from(std::move(value), parents, std::move(backward));
}

Var Tape::record(Matrix value, const std::vector<Var>& parents, Backward backward)
{
    return record_from(std::move(value), parents, std::move(backward));
}

template <typename Range>
Var Tape::record_from(Matrix value, const Range& parents, Backward backward)
{
    Node node;
    node.value = std::move(value);
    if (grad_enabled_) {
        for (const Var& p : parents) {
            if (&p.tape() != this) {
                throw Error(ErrorCode::InvalidInput, "operands recorded on different tapes");
            }
            node.requires_grad = node.requires_grad || requires_grad(p.id());
        }
        if (node.requires_grad) {
            node.backward = std::move(backward);
        }
    }
    nodes_.push_back(std::move(node));
    return {this, static_cast<int>(nodes_.size() - 1)};
}

Matrix& Tape::grad(int id)
{
    Node& node = nodes_[static_cast<std::size_t>(id)];
    if (!node.grad_ready) {
        node.grad = Matrix::Zero(node.value.rows(), node.value.cols());
        node.grad_ready = true;
    }
    return node.grad;
}

void Tape::backward(const Var& root)
{
    if (&root.tape() != this) {
        throw Error(ErrorCode::InvalidInput, "root belongs to a different tape");
    }
    if (root.rows() != 1 || root.cols() != 1) {
        throw Error(ErrorCode::ShapeMismatch, "backward needs a scalar root, got " + std::to_string(root.rows()) +
                                                  "x" + std::to_string(root.cols()));
    }
    if (!requires_grad(root.id())) {
        return;
    }
    grad(root.id())(0, 0) += 1.0;
    for (int id = root.id(); id >= 0; --id) {
        Node& node = nodes_[static_cast<std::size_t>(id)];
        if (node.grad_ready && node.backward) {
            node.backward(*this, node.grad);
        }
    }
}

void Tape::for_each_parameter_grad(const std::function<void(const ParamRef&, const Matrix&)>& fn) const
{
    for (const Node& node : nodes_) {
        if (node.is_parameter && node.grad_ready) {
            fn(node.param, node.grad);
        }
    }
}

} // namespace atfnet::ad
