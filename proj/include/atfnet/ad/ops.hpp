#pragma once

#include <atfnet/ad/tape.hpp>

#include <vector>

namespace atfnet::ad {

// Matrix algebra.
Var matmul(const Var& a, const Var& b);
Var transpose(const Var& a);
/// m * a for a constant matrix m.
Var left_multiply(const Matrix& m, const Var& a);

// Elementwise, equal shapes.
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var hadamard(const Var& a, const Var& b);
Var scale(const Var& a, double factor);
Var square(const Var& a);
Var relu(const Var& a);
/// sqrt(a) floored at eps; the gradient is zero wherever the floor is active.
Var sqrt_floor(const Var& a, double eps);
/// sqrt(re^2 + im^2); gradient taken as zero at the origin.
Var modulus(const Var& re, const Var& im);

// Broadcasts. `row` is 1 x cols, `col` is rows x 1, `s` is 1 x 1.
Var add_row(const Var& a, const Var& row);
Var mul_row(const Var& a, const Var& row);
Var sub_col(const Var& a, const Var& col);
Var div_col(const Var& a, const Var& col);
Var mul_col(const Var& a, const Var& col);
Var add_scalar(const Var& a, const Var& s);
Var sub_scalar(const Var& a, const Var& s);
Var mul_scalar(const Var& a, const Var& s);
Var div_scalar(const Var& a, const Var& s);

// Reductions.
Var row_mean(const Var& a);
Var mean_all(const Var& a);
Var sum_all(const Var& a);

/// Row-wise softmax.
Var softmax_rows(const Var& a);

// Reshaping.
Var slice_cols(const Var& a, Index start, Index count);
Var slice_rows(const Var& a, Index start, Index count);
Var hcat(const std::vector<Var>& parts);
/// Row-major flatten into a single row.
Var flatten_rows(const Var& a);
/// Rows j = x[j*stride .. j*stride+patch-1] of a column vector.
Var unfold(const Var& x, Index patch, Index stride);

} // namespace atfnet::ad
