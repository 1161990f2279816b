#pragma once

#include "patprune/common.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace patprune {

// Dense row-major matrix of real numbers. Carrier of weights, activations
// and ADMM variables throughout the library.
struct RealMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<real_t> data;

    RealMatrix() = default;
    RealMatrix(int r, int c, real_t fill = 0);
    RealMatrix(int r, int c, std::initializer_list<real_t> values);

    real_t& at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
    real_t at(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }

    size_t size() const { return data.size(); }
    bool same_shape(const RealMatrix& o) const { return rows == o.rows && cols == o.cols; }
    std::string shape_str() const;

    bool all_finite() const;
};

RealMatrix zeros(int rows, int cols);
RealMatrix ones(int rows, int cols);
RealMatrix identity(int n);

// a * b with the usual inner-dimension requirement.
RealMatrix matmul(const RealMatrix& a, const RealMatrix& b);
// a * b^T without materializing the transpose.
RealMatrix matmul_bt(const RealMatrix& a, const RealMatrix& b);
// a^T * b without materializing the transpose.
RealMatrix matmul_at(const RealMatrix& a, const RealMatrix& b);

RealMatrix transpose(const RealMatrix& a);
RealMatrix add(const RealMatrix& a, const RealMatrix& b);
RealMatrix sub(const RealMatrix& a, const RealMatrix& b);
RealMatrix hadamard(const RealMatrix& a, const RealMatrix& b);
RealMatrix scale(const RealMatrix& a, real_t c);

// y += c * x, shapes must agree.
void axpy(RealMatrix& y, real_t c, const RealMatrix& x);

real_t frobenius_norm(const RealMatrix& a);
real_t frobenius_sq(const RealMatrix& a);
real_t max_abs(const RealMatrix& a);
real_t sum(const RealMatrix& a);
int count_nonzero(const RealMatrix& a);

void require_same_shape(const RealMatrix& a, const RealMatrix& b, const char* op);
void require_finite(const RealMatrix& a, const char* what);

} // namespace patprune
