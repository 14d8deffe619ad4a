#pragma once

// Direct writes into ParamStore tensors for hand-built test cases.

#include <atfnet/error.hpp>
#include <atfnet/nn/params.hpp>

#include <Eigen/Core>

#include <string>

namespace testing_params {

inline atfnet::nn::ParamTensor& tensor(atfnet::nn::ParamStore& store, const std::string& name)
{
    const auto i = store.find(name);
    if (!i) {
        throw atfnet::Error(atfnet::ErrorCode::InvalidInput, "no tensor " + name);
    }
    return store[*i];
}

/// Writes a complex matrix into a {rows, cols, 2} (or {cols, 2}) tensor.
inline void set_complex(atfnet::nn::ParamStore& store, const std::string& name, const Eigen::MatrixXcd& m)
{
    auto& t = tensor(store, name);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            const Eigen::Index at = 2 * (r * m.cols() + c);
            t.data(at) = m(r, c).real();
            t.data(at + 1) = m(r, c).imag();
        }
    }
}

inline void set_real(atfnet::nn::ParamStore& store, const std::string& name, const Eigen::MatrixXd& m)
{
    auto& t = tensor(store, name);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            t.data(r * m.cols() + c) = m(r, c);
        }
    }
}

inline Eigen::MatrixXcd get_complex(const atfnet::nn::ParamStore& store, const std::string& name)
{
    const auto& t = store[*store.find(name)];
    Eigen::MatrixXcd m(t.rows(), t.cols());
    m.real() = t.plane(0);
    m.imag() = t.plane(1);
    return m;
}

inline void zero_matching(atfnet::nn::ParamStore& store, const std::string& needle)
{
    for (auto& t : store) {
        if (t.name.find(needle) != std::string::npos) {
            t.data.setZero();
        }
    }
}

} // namespace testing_params
