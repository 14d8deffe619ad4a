#pragma once

// Complex arithmetic on pairs of real tape nodes. Gradients are taken with
// respect to the real and imaginary planes independently.

#include <atfnet/ad/ops.hpp>

#include <vector>

namespace atfnet::ad {

struct CVar {
    Var re;
    Var im;

    Index rows() const { return re.rows(); }
    Index cols() const { return re.cols(); }
    Tape& tape() const { return re.tape(); }
};

CVar complex_constant(Tape& tape, const Matrix& re, const Matrix& im);

/// (a_r + i a_i)(b_r + i b_i) as a matrix product.
CVar cmatmul(const CVar& a, const CVar& b);
/// Real matrix times complex matrix.
CVar rmatmul(const Var& a, const CVar& b);
/// Plain (non-conjugating) transpose.
CVar ctranspose(const CVar& a);
CVar cconj(const CVar& a);

CVar cadd(const CVar& a, const CVar& b);
CVar csub(const CVar& a, const CVar& b);
Var cmodulus(const CVar& a);
/// ReLU applied to the real and imaginary planes separately.
CVar split_relu(const CVar& a);

CVar cadd_row(const CVar& a, const CVar& row);
CVar cmul_row(const CVar& a, const CVar& row);
CVar csub_col(const CVar& a, const CVar& col);
CVar cdiv_col(const CVar& a, const Var& real_col);
CVar crow_mean(const CVar& a);

CVar cmean_all(const CVar& a);
CVar cadd_scalar(const CVar& a, const CVar& s);
CVar csub_scalar(const CVar& a, const CVar& s);
CVar cmul_real_scalar(const CVar& a, const Var& s);
CVar cdiv_real_scalar(const CVar& a, const Var& s);

CVar cslice_cols(const CVar& a, Index start, Index count);
CVar chcat(const std::vector<CVar>& parts);

} // namespace atfnet::ad
