#include <atfnet/ad/complex.hpp>

namespace atfnet::ad {

CVar complex_constant(Tape& tape, const Matrix& re, const Matrix& im)
{
    return {tape.constant(re), tape.constant(im)};
}

CVar cmatmul(const CVar& a, const CVar& b)
{
    return {sub(matmul(a.re, b.re), matmul(a.im, b.im)), add(matmul(a.re, b.im), matmul(a.im, b.re))};
}

CVar rmatmul(const Var& a, const CVar& b) { return {matmul(a, b.re), matmul(a, b.im)}; }

CVar ctranspose(const CVar& a) { return {transpose(a.re), transpose(a.im)}; }

CVar cconj(const CVar& a) { return {a.re, scale(a.im, -1.0)}; }

CVar cadd(const CVar& a, const CVar& b) { return {add(a.re, b.re), add(a.im, b.im)}; }

CVar csub(const CVar& a, const CVar& b) { return {sub(a.re, b.re), sub(a.im, b.im)}; }

Var cmodulus(const CVar& a) { return modulus(a.re, a.im); }

CVar split_relu(const CVar& a) { return {relu(a.re), relu(a.im)}; }

CVar cadd_row(const CVar& a, const CVar& row) { return {add_row(a.re, row.re), add_row(a.im, row.im)}; }

CVar cmul_row(const CVar& a, const CVar& row)
{
    return {sub(mul_row(a.re, row.re), mul_row(a.im, row.im)), add(mul_row(a.re, row.im), mul_row(a.im, row.re))};
}

CVar csub_col(const CVar& a, const CVar& col) { return {sub_col(a.re, col.re), sub_col(a.im, col.im)}; }

CVar cdiv_col(const CVar& a, const Var& real_col) { return {div_col(a.re, real_col), div_col(a.im, real_col)}; }

CVar crow_mean(const CVar& a) { return {row_mean(a.re), row_mean(a.im)}; }

CVar cmean_all(const CVar& a) { return {mean_all(a.re), mean_all(a.im)}; }

CVar cadd_scalar(const CVar& a, const CVar& s) { return {add_scalar(a.re, s.re), add_scalar(a.im, s.im)}; }

CVar csub_scalar(const CVar& a, const CVar& s) { return {sub_scalar(a.re, s.re), sub_scalar(a.im, s.im)}; }

CVar cmul_real_scalar(const CVar& a, const Var& s) { return {mul_scalar(a.re, s), mul_scalar(a.im, s)}; }

CVar cdiv_real_scalar(const CVar& a, const Var& s) { return {div_scalar(a.re, s), div_scalar(a.im, s)}; }

CVar cslice_cols(const CVar& a, Index start, Index count)
{
    return {slice_cols(a.re, start, count), slice_cols(a.im, start, count)};
}

CVar chcat(const std::vector<CVar>& parts)
{
    std::vector<Var> re;
    std::vector<Var> im;
    re.reserve(parts.size());
    im.reserve(parts.size());
    for (const CVar& p : parts) {
        re.push_back(p.re);
        im.push_back(p.im);
    }
    return {hcat(re), hcat(im)};
}

} // namespace atfnet::ad
