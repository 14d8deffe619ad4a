#include <atfnet/error.hpp>
#include <atfnet/nn/params.hpp>

#include <cmath>
#include <numeric>

namespace atfnet::nn {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using PlaneMap = Eigen::Map<const RowMatrix, 0, Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>>;
using MutablePlaneMap = Eigen::Map<RowMatrix, 0, Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>>;

} // namespace

Index ParamTensor::rows() const
{
    const std::size_t logical = shape.size() - (is_complex ? 1 : 0);
    return logical >= 2 ? shape[0] : 1;
}

Index ParamTensor::cols() const
{
    const std::size_t logical = shape.size() - (is_complex ? 1 : 0);
    return logical >= 2 ? shape[1] : shape[0];
}

Matrix ParamTensor::plane(int which) const
{
    const Index r = rows();
    const Index c = cols();
    if (!is_complex) {
        return PlaneMap(data.data(), r, c, Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>(c, 1));
    }
    return PlaneMap(data.data() + which, r, c, Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>(2 * c, 2));
}

void ParamTensor::add_grad(int which, const Matrix& g)
{
    const Index r = rows();
    const Index c = cols();
    if (!is_complex) {
        MutablePlaneMap(grad.data(), r, c, Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>(c, 1)) += g;
        return;
    }
    MutablePlaneMap(grad.data() + which, r, c, Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>(2 * c, 2)) += g;
}

std::size_t ParamStore::add(std::string name, std::vector<Index> shape, bool is_complex, InitRule init, Index fan_in)
{
    if (find(name)) {
        throw Error(ErrorCode::InvalidInput, "duplicate parameter name " + name);
    }
    if (is_complex) {
        shape.push_back(2);
    }
    const Index count = std::accumulate(shape.begin(), shape.end(), Index{1}, std::multiplies<>());
    ParamTensor t;
    t.name = std::move(name);
    t.shape = std::move(shape);
    t.is_complex = is_complex;
    t.data = Eigen::VectorXd::Zero(count);
    t.grad = Eigen::VectorXd::Zero(count);
    t.init = init;
    t.fan_in = fan_in;
    tensors_.push_back(std::move(t));
    return tensors_.size() - 1;
}

std::optional<std::size_t> ParamStore::find(const std::string& name) const
{
    for (std::size_t i = 0; i < tensors_.size(); ++i) {
        if (tensors_[i].name == name) {
            return i;
        }
    }
    return std::nullopt;
}

Index ParamStore::scalar_count() const
{
    Index total = 0;
    for (const auto& t : tensors_) {
        total += t.data.size();
    }
    return total;
}

void ParamStore::initialize(Rng& rng)
{
    for (auto& t : tensors_) {
        switch (t.init) {
        case InitRule::FanIn: {
            const double bound = 1.0 / std::sqrt(static_cast<double>(t.fan_in));
            for (Index i = 0; i < t.data.size(); ++i) {
                t.data(i) = rng.uniform(-bound, bound);
            }
            break;
        }
        case InitRule::Positional:
            for (Index i = 0; i < t.data.size(); ++i) {
                t.data(i) = rng.uniform(-0.02, 0.02);
            }
            break;
        case InitRule::Zero:
            t.data.setZero();
            break;
        case InitRule::One:
            if (t.is_complex) {
                for (Index i = 0; i < t.data.size(); ++i) {
                    t.data(i) = (i % 2 == 0) ? 1.0 : 0.0;
                }
            } else {
                t.data.setOnes();
            }
            break;
        }
        t.grad.setZero();
    }
}

void ParamStore::zero_grad()
{
    for (auto& t : tensors_) {
        t.grad.setZero();
    }
}

void ParamStore::accumulate_grads(const ad::Tape& tape)
{
    tape.for_each_parameter_grad([this](const ad::ParamRef& ref, const Matrix& g) {
        if (ref.owner == this) {
            tensors_[ref.index].add_grad(ref.plane, g);
        }
    });
}

ad::Var ParamStore::real(ad::Tape& tape, std::size_t i) const
{
    const ParamTensor& t = tensors_[i];
    if (t.is_complex) {
        throw Error(ErrorCode::ShapeMismatch, t.name + " is complex, bound as real");
    }
    return tape.parameter(t.plane(-1), {this, i, -1});
}

ad::CVar ParamStore::complex(ad::Tape& tape, std::size_t i) const
{
    const ParamTensor& t = tensors_[i];
    if (!t.is_complex) {
        throw Error(ErrorCode::ShapeMismatch, t.name + " is real, bound as complex");
    }
    return {tape.parameter(t.plane(0), {this, i, 0}), tape.parameter(t.plane(1), {this, i, 1})};
}

bool ParamStore::all_finite() const
{
    for (const auto& t : tensors_) {
        if (!t.data.allFinite()) {
            return false;
        }
    }
    return true;
}

} // namespace atfnet::nn
