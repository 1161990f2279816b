#include "patprune/matrix.hpp"

#include <cmath>
#include <cstdlib>

namespace patprune {

RealMatrix::RealMatrix(int r, int c, real_t fill) : rows(r), cols(c) {
    if (r <= 0 || c <= 0) {
        throw dimension_error("matrix dimensions must be positive, got " + std::to_string(r) +
                              "x" + std::to_string(c));
    }
    data.assign(static_cast<size_t>(r) * c, fill);
}

RealMatrix::RealMatrix(int r, int c, std::initializer_list<real_t> values) : RealMatrix(r, c) {
    if (values.size() != data.size()) {
        throw dimension_error("initializer length " + std::to_string(values.size()) +
                              " does not match " + shape_str());
    }
    size_t i = 0;
    for (real_t v : values) data[i++] = v;
}

std::string RealMatrix::shape_str() const {
    return std::to_string(rows) + "x" + std::to_string(cols);
}

bool RealMatrix::all_finite() const {
    for (real_t v : data) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

RealMatrix zeros(int rows, int cols) { return RealMatrix(rows, cols, 0); }

RealMatrix ones(int rows, int cols) { return RealMatrix(rows, cols, 1); }

RealMatrix identity(int n) {
    RealMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

void require_same_shape(const RealMatrix& a, const RealMatrix& b, const char* op) {
    if (!a.same_shape(b)) {
        throw dimension_error(std::string(op) + ": shape mismatch " + a.shape_str() + " vs " +
                              b.shape_str());
    }
}

void require_finite(const RealMatrix& a, const char* what) {
    if (!a.all_finite()) {
        throw numeric_error(std::string(what) + ": non-finite entries");
    }
}

RealMatrix matmul(const RealMatrix& a, const RealMatrix& b) {
    if (a.cols != b.rows) {
        throw dimension_error("matmul: inner dimensions disagree, " + a.shape_str() + " x " +
                              b.shape_str());
    }
    RealMatrix out(a.rows, b.cols);
    const int n = a.rows, k = a.cols, m = b.cols;
    for (int i = 0; i < n; ++i) {
        real_t* out_row = &out.data[static_cast<size_t>(i) * m];
        const real_t* a_row = &a.data[static_cast<size_t>(i) * k];
        for (int p = 0; p < k; ++p) {
            const real_t av = a_row[p];
            if (av == 0) continue;
            const real_t* b_row = &b.data[static_cast<size_t>(p) * m];
            for (int j = 0; j < m; ++j) out_row[j] += av * b_row[j];
        }
    }
    return out;
}

RealMatrix matmul_bt(const RealMatrix& a, const RealMatrix& b) {
    if (a.cols != b.cols) {
        throw dimension_error("matmul_bt: inner dimensions disagree, " + a.shape_str() +
                              " x (" + b.shape_str() + ")^T");
    }
    RealMatrix out(a.rows, b.rows);
    const int n = a.rows, k = a.cols, m = b.rows;
    for (int i = 0; i < n; ++i) {
        const real_t* a_row = &a.data[static_cast<size_t>(i) * k];
        real_t* out_row = &out.data[static_cast<size_t>(i) * m];
        for (int j = 0; j < m; ++j) {
            const real_t* b_row = &b.data[static_cast<size_t>(j) * k];
            real_t acc = 0;
            for (int p = 0; p < k; ++p) acc += a_row[p] * b_row[p];
            out_row[j] = acc;
        }
    }
    return out;
}

RealMatrix matmul_at(const RealMatrix& a, const RealMatrix& b) {
    if (a.rows != b.rows) {
        throw dimension_error("matmul_at: inner dimensions disagree, (" + a.shape_str() +
                              ")^T x " + b.shape_str());
    }
    RealMatrix out(a.cols, b.cols);
    const int n = a.cols, k = a.rows, m = b.cols;
    for (int p = 0; p < k; ++p) {
        const real_t* a_row = &a.data[static_cast<size_t>(p) * n];
        const real_t* b_row = &b.data[static_cast<size_t>(p) * m];
        for (int i = 0; i < n; ++i) {
            const real_t av = a_row[i];
            if (av == 0) continue;
            real_t* out_row = &out.data[static_cast<size_t>(i) * m];
            for (int j = 0; j < m; ++j) out_row[j] += av * b_row[j];
        }
    }
    return out;
}

RealMatrix transpose(const RealMatrix& a) {
    RealMatrix out(a.cols, a.rows);
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j) out.at(j, i) = a.at(i, j);
    return out;
}

RealMatrix add(const RealMatrix& a, const RealMatrix& b) {
    require_same_shape(a, b, "add");
    RealMatrix out = a;
    for (size_t i = 0; i < out.size(); ++i) out.data[i] += b.data[i];
    return out;
}

RealMatrix sub(const RealMatrix& a, const RealMatrix& b) {
    require_same_shape(a, b, "sub");
    RealMatrix out = a;
    for (size_t i = 0; i < out.size(); ++i) out.data[i] -= b.data[i];
    return out;
}

RealMatrix hadamard(const RealMatrix& a, const RealMatrix& b) {
    require_same_shape(a, b, "hadamard");
    RealMatrix out = a;
    for (size_t i = 0; i < out.size(); ++i) out.data[i] *= b.data[i];
    return out;
}

RealMatrix scale(const RealMatrix& a, real_t c) {
    RealMatrix out = a;
    for (real_t& v : out.data) v *= c;
    return out;
}

void axpy(RealMatrix& y, real_t c, const RealMatrix& x) {
    require_same_shape(y, x, "axpy");
    for (size_t i = 0; i < y.size(); ++i) y.data[i] += c * x.data[i];
}

real_t frobenius_sq(const RealMatrix& a) {
    real_t s = 0;
    for (real_t v : a.data) s += v * v;
    return s;
}

real_t frobenius_norm(const RealMatrix& a) { return std::sqrt(frobenius_sq(a)); }

real_t max_abs(const RealMatrix& a) {
    real_t m = 0;
    for (real_t v : a.data) m = std::max(m, std::abs(v));
    return m;
}

real_t sum(const RealMatrix& a) {
    real_t s = 0;
    for (real_t v : a.data) s += v;
    return s;
}

int count_nonzero(const RealMatrix& a) {
    int n = 0;
    for (real_t v : a.data) n += (v != 0);
    return n;
}

} // namespace patprune
