#include <atfnet/ad/ops.hpp>
#include <atfnet/error.hpp>

#include <cmath>
#include <string>

namespace atfnet::ad {

namespace {

std::string shape_of(const Var& v) { return std::to_string(v.rows()) + "x" + std::to_string(v.cols()); }

void require_same_shape(const Var& a, const Var& b, const char* op)
{
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw Error(ErrorCode::ShapeMismatch, std::string(op) + ": " + shape_of(a) + " vs " + shape_of(b));
    }
}

void require_shape(const Var& v, Index rows, Index cols, const char* op)
{
    if (v.rows() != rows || v.cols() != cols) {
        throw Error(ErrorCode::ShapeMismatch, std::string(op) + ": expected " + std::to_string(rows) + "x" +
                                                  std::to_string(cols) + ", got " + shape_of(v));
    }
}

} // namespace

Var matmul(const Var& a, const Var& b)
{
    if (a.cols() != b.rows()) {
        throw Error(ErrorCode::ShapeMismatch, "matmul: " + shape_of(a) + " * " + shape_of(b));
    }
    const int ia = a.id();
    const int ib = b.id();
    return a.tape().record(a.value() * b.value(), {a, b}, [ia, ib](Tape& t, const Matrix& g) {
        if (t.requires_grad(ia)) {
            t.grad(ia).noalias() += g * t.value(ib).transpose();
        }
        if (t.requires_grad(ib)) {
            t.grad(ib).noalias() += t.value(ia).transpose() * g;
        }
    });
}

Var transpose(const Var& a)
{
    const int ia = a.id();
    return a.tape().record(a.value().transpose(), {a},
                           [ia](Tape& t, const Matrix& g) { t.grad(ia) += g.transpose(); });
}

Var left_multiply(const Matrix& m, const Var& a)
{
    if (m.cols() != a.rows()) {
        throw Error(ErrorCode::ShapeMismatch, "left_multiply: constant has " + std::to_string(m.cols()) +
                                                  " columns, operand is " + shape_of(a));
    }
    const int ia = a.id();
    return a.tape().record(m * a.value(), {a},
                           [ia, m](Tape& t, const Matrix& g) { t.grad(ia).noalias() += m.transpose() * g; });
}

Var add(const Var& a, const Var& b)
{
    require_same_shape(a, b, "add");
    const int ia = a.id();
    const int ib = b.id();
    return a.tape().record(a.value() + b.value(), {a, b}, [ia, ib](Tape& t, const Matrix& g) {
        if (t.requires_grad(ia)) {
            t.grad(ia) += g;
        }
        if (t.requires_grad(ib)) {
            t.grad(ib) += g;
        }
    });
}

Var sub(const Var& a, const Var& b)
{
    require_same_shape(a, b, "sub");
    const int ia = a.id();
    const int ib = b.id();
    return a.tape().record(a.value() - b.value(), {a, b}, [ia, ib](Tape& t, const Matrix& g) {
        if (t.requires_grad(ia)) {
            t.grad(ia) += g;
        }
        if (t.requires_grad(ib)) {
            t.grad(ib) -= g;
        }
    });
}

Var hadamard(const Var& a, const Var& b)
{
    require_same_shape(a, b, "hadamard");
    const int ia = a.id();
    const int ib = b.id();
    return a.tape().record(a.value().cwiseProduct(b.value()), {a, b}, [ia, ib](Tape& t, const Matrix& g) {
        if (t.requires_grad(ia)) {
            t.grad(ia) += g.cwiseProduct(t.value(ib));
        }
        if (t.requires_grad(ib)) {
            t.grad(ib) += g.cwiseProduct(t.value(ia));
        }
    });
}

Var scale(const Var& a, double factor)
{
    const int ia = a.id();
    return a.tape().record(a.value() * factor, {a},
                           [ia, factor](Tape& t, const Matrix& g) { t.grad(ia) += factor * g; });
}

Var square(const Var& a)
{
    const int ia = a.id();
    return a.tape().record(a.value().array().square().matrix(), {a}, [ia](Tape& t, const Matrix& g) {
        t.grad(ia) += (2.0 * g.array() * t.value(ia).array()).matrix();
    });
}

Var relu(const Var& a)
{
    const int ia = a.id();
    return a.tape().record(a.value().cwiseMax(0.0), {a}, [ia](Tape& t, const Matrix& g) {
        t.grad(ia) += (t.value(ia).array() > 0.0).select(g, 0.0);
    });
}

Var sqrt_floor(const Var& a, double eps)
{
    const int ia = a.id();
    Matrix root = a.value().cwiseMax(0.0).cwiseSqrt();
    Matrix value = root.cwiseMax(eps);
    return a.tape().record(std::move(value), {a}, [ia, eps, root](Tape& t, const Matrix& g) {
        t.grad(ia) += (root.array() > eps).select(0.5 * g.array() / root.array(), 0.0).matrix();
    });
}

Var modulus(const Var& re, const Var& im)
{
    require_same_shape(re, im, "modulus");
    const int ir = re.id();
    const int ii = im.id();
    Matrix value = (re.value().array().square() + im.value().array().square()).sqrt().matrix();
    return re.tape().record(value, {re, im}, [ir, ii, value](Tape& t, const Matrix& g) {
        const auto safe = (value.array() > 0.0).select(value.array(), 1.0);
        const auto live = (value.array() > 0.0).select(g.array(), 0.0);
        if (t.requires_grad(ir)) {
            t.grad(ir) += (live * t.value(ir).array() / safe).matrix();
        }
        if (t.requires_grad(ii)) {
            t.grad(ii) += (live * t.value(ii).array() / safe).matrix();
        }
    });
}

Var add_row(const Var& a, const Var& row)
{
    require_shape(row, 1, a.cols(), "add_row");
    const int ia = a.id();
    const int ir = row.id();
    Matrix value = a.value().rowwise() + row.value().row(0);
    return a.tape().record(std::move(value), {a, row}, [ia, ir](Tape& t, const Matrix& g) {
        if (t.requires_grad(ia)) {
            t.grad(ia) += g;
        }
        if (t.requires_grad(ir)) {
            t.grad(ir) += g.colwise().sum();
        }
    });
}

Var mul_row(const Var& a, const Var& row)
{
    require_shape(row, 1, a.cols(), "mul_row");
    const int ia = a.id();
    const int ir = row.id();
    Matrix value = a.value().array().rowwise() * row.value().row(0).array();
    return a.tape().record(std::move(value), {a, row}, [ia, ir](Tape& t, const Matrix& g) {
        if (t.requires_grad(ia)) {
            t.grad(ia) += (g.array().rowwise() * t.value(ir).row(0).array()).matrix();
        }
        if (t.requires_grad(ir)) {
            t.grad(ir) += g.cwiseProduct(t.value(ia)).colwise().sum();
        }
    });
}

Var sub_col(const Var& a, const Var& col)
{
    require_shape(col, a.rows(), 1, "sub_col");
    const int ia = a.id();
    const int ic = col.id();
    Matrix value = a.value().colwise() - col.value().col(0);
    return a.tape().record(std::move(value), {a, col}, [ia, ic](Tape& t, const Matrix& g) {
        if (t.requires_grad(ia)) {
            t.grad(ia) += g;
        }
        if (t.requires_grad(ic)) {
            t.grad(ic) -= g.rowwise().sum();
        }
    });
}

Var mul_col(const Var& a, const Var& col)
{
    require_shape(col, a.rows(), 1, "mul_col");
    const int ia = a.id();
    const int ic = col.id();
    Matrix value = a.value().array().colwise() * col.value().col(0).array();
    return a.tape().record(std::move(value), {a, col}, [ia, ic](Tape& t, const Matrix& g) {
        if (t.requires_grad(ia)) {
            t.grad(ia) += (g.array().colwise() * t.value(ic).col(0).array()).matrix();
        }
        if (t.requires_grad(ic)) {
            t.grad(ic) += g.cwiseProduct(t.value(ia)).rowwise().sum();
        }
    });
}

Var div_col(const Var& a, const Var& col)
{
    require_shape(col, a.rows(), 1, "div_col");
    const int ia = a.id();
    const int ic = col.id();
    Matrix value = a.value().array().colwise() / col.value().col(0).array();
    return a.tape().record(value, {a, col}, [ia, ic, value](Tape& t, const Matrix& g) {
        const auto& c = t.value(ic).col(0).array();
        if (t.requires_grad(ia)) {
            t.grad(ia) += (g.array().colwise() / c).matrix();
        }
        if (t.requires_grad(ic)) {
            t.grad(ic) -= (g.cwiseProduct(value).rowwise().sum().array() / c).matrix();
        }
    });
}

Var add_scalar(const Var& a, const Var& s)
{
    require_shape(s, 1, 1, "add_scalar");
    const int ia = a.id();
    const int is = s.id();
    Matrix value = a.value().array() + s.value()(0, 0);
    return a.tape().record(std::move(value), {a, s}, [ia, is](Tape& t, const Matrix& g) {
        if (t.requires_grad(ia)) {
            t.grad(ia) += g;
        }
        if (t.requires_grad(is)) {
            t.grad(is)(0, 0) += g.sum();
        }
    });
}

Var sub_scalar(const Var& a, const Var& s)
{
    require_shape(s, 1, 1, "sub_scalar");
    const int ia = a.id();
    const int is = s.id();
    Matrix value = a.value().array() - s.value()(0, 0);
    return a.tape().record(std::move(value), {a, s}, [ia, is](Tape& t, const Matrix& g) {
        if (t.requires_grad(ia)) {
            t.grad(ia) += g;
        }
        if (t.requires_grad(is)) {
            t.grad(is)(0, 0) -= g.sum();
        }
    });
}

Var mul_scalar(const Var& a, const Var& s)
{
    require_shape(s, 1, 1, "mul_scalar");
    const int ia = a.id();
    const int is = s.id();
    Matrix value = a.value() * s.value()(0, 0);
    return a.tape().record(std::move(value), {a, s}, [ia, is](Tape& t, const Matrix& g) {
        if (t.requires_grad(ia)) {
            t.grad(ia) += g * t.value(is)(0, 0);
        }
        if (t.requires_grad(is)) {
            t.grad(is)(0, 0) += g.cwiseProduct(t.value(ia)).sum();
        }
    });
}

Var div_scalar(const Var& a, const Var& s)
{
    require_shape(s, 1, 1, "div_scalar");
    const int ia = a.id();
    const int is = s.id();
    Matrix value = a.value() / s.value()(0, 0);
    return a.tape().record(value, {a, s}, [ia, is, value](Tape& t, const Matrix& g) {
        const double d = t.value(is)(0, 0);
        if (t.requires_grad(ia)) {
            t.grad(ia) += g / d;
        }
        if (t.requires_grad(is)) {
            t.grad(is)(0, 0) -= g.cwiseProduct(value).sum() / d;
        }
    });
}

Var row_mean(const Var& a)
{
    const int ia = a.id();
    const auto cols = static_cast<double>(a.cols());
    return a.tape().record(a.value().rowwise().mean(), {a}, [ia, cols](Tape& t, const Matrix& g) {
        t.grad(ia).colwise() += g.col(0) / cols;
    });
}

Var mean_all(const Var& a)
{
    const int ia = a.id();
    const auto n = static_cast<double>(a.value().size());
    Matrix value(1, 1);
    value(0, 0) = a.value().mean();
    return a.tape().record(std::move(value), {a},
                           [ia, n](Tape& t, const Matrix& g) { t.grad(ia).array() += g(0, 0) / n; });
}

Var sum_all(const Var& a)
{
    const int ia = a.id();
    Matrix value(1, 1);
    value(0, 0) = a.value().sum();
    return a.tape().record(std::move(value), {a},
                           [ia](Tape& t, const Matrix& g) { t.grad(ia).array() += g(0, 0); });
}

Var softmax_rows(const Var& a)
{
    const int ia = a.id();
    Matrix shifted = a.value().colwise() - a.value().rowwise().maxCoeff();
    Matrix value = shifted.array().exp().matrix();
    value.array().colwise() /= value.rowwise().sum().array();
    return a.tape().record(value, {a}, [ia, value](Tape& t, const Matrix& g) {
        const Eigen::VectorXd dot = g.cwiseProduct(value).rowwise().sum();
        t.grad(ia) += (value.array() * (g.array().colwise() - dot.array())).matrix();
    });
}

Var slice_cols(const Var& a, Index start, Index count)
{
    if (start < 0 || count < 0 || start + count > a.cols()) {
        throw Error(ErrorCode::ShapeMismatch, "slice_cols out of range for " + shape_of(a));
    }
    const int ia = a.id();
    return a.tape().record(a.value().middleCols(start, count), {a}, [ia, start, count](Tape& t, const Matrix& g) {
        t.grad(ia).middleCols(start, count) += g;
    });
}

Var slice_rows(const Var& a, Index start, Index count)
{
    if (start < 0 || count < 0 || start + count > a.rows()) {
        throw Error(ErrorCode::ShapeMismatch, "slice_rows out of range for " + shape_of(a));
    }
    const int ia = a.id();
    return a.tape().record(a.value().middleRows(start, count), {a}, [ia, start, count](Tape& t, const Matrix& g) {
        t.grad(ia).middleRows(start, count) += g;
    });
}

Var hcat(const std::vector<Var>& parts)
{
    if (parts.empty()) {
        throw Error(ErrorCode::ShapeMismatch, "hcat of nothing");
    }
    Tape& tape = parts.front().tape();
    const Index rows = parts.front().rows();
    Index cols = 0;
    for (const Var& p : parts) {
        if (p.rows() != rows) {
            throw Error(ErrorCode::ShapeMismatch, "hcat: row counts differ");
        }
        cols += p.cols();
    }
    Matrix value(rows, cols);
    std::vector<std::pair<int, Index>> layout;
    Index offset = 0;
    for (const Var& p : parts) {
        value.middleCols(offset, p.cols()) = p.value();
        layout.emplace_back(p.id(), offset);
        offset += p.cols();
    }
    return tape.record(std::move(value), parts, [layout](Tape& t, const Matrix& g) {
        for (const auto& [id, off] : layout) {
            if (t.requires_grad(id)) {
                t.grad(id) += g.middleCols(off, t.value(id).cols());
            }
        }
    });
}

Var flatten_rows(const Var& a)
{
    const Index rows = a.rows();
    const Index cols = a.cols();
    Matrix value(1, rows * cols);
    for (Index r = 0; r < rows; ++r) {
        value.middleCols(r * cols, cols) = a.value().row(r);
    }
    const int ia = a.id();
    return a.tape().record(std::move(value), {a}, [ia, rows, cols](Tape& t, const Matrix& g) {
        Matrix& ga = t.grad(ia);
        for (Index r = 0; r < rows; ++r) {
            ga.row(r) += g.middleCols(r * cols, cols);
        }
    });
}

Var unfold(const Var& x, Index patch, Index stride)
{
    if (x.cols() != 1) {
        throw Error(ErrorCode::ShapeMismatch, "unfold expects a column vector, got " + shape_of(x));
    }
    if (patch < 1 || stride < 1) {
        throw Error(ErrorCode::InvalidInput, "patch length and stride must be positive");
    }
    if (patch > x.rows()) {
        throw Error(ErrorCode::PatchTooLong,
                    "patch length " + std::to_string(patch) + " exceeds series length " + std::to_string(x.rows()));
    }
    const Index count = (x.rows() - patch) / stride + 1;
    Matrix value(count, patch);
    for (Index j = 0; j < count; ++j) {
        value.row(j) = x.value().col(0).segment(j * stride, patch).transpose();
    }
    const int ix = x.id();
    return x.tape().record(std::move(value), {x}, [ix, count, patch, stride](Tape& t, const Matrix& g) {
        Matrix& gx = t.grad(ix);
        for (Index j = 0; j < count; ++j) {
            gx.col(0).segment(j * stride, patch) += g.row(j).transpose();
        }
    });
}

} // namespace atfnet::ad
