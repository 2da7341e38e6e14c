#include "kernel_table.hpp"

#include <cmath>

namespace glcoef::kernels::detail {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void matvec_scalar(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
    for (std::size_t i = 0; i < rows; ++i) y[i] = dot_scalar(a + i * cols, x, cols);
}

void matvec_transposed_scalar(const double* a, std::size_t rows, std::size_t cols, const double* x,
                              double* y) {
    for (std::size_t j = 0; j < cols; ++j) y[j] = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
        if (x[i] != 0.0) axpy_scalar(x[i], a + i * cols, y, cols);
    }
}

double max_abs_diff_scalar(const double* x, const double* y, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::fmax(m, std::abs(x[i] - y[i]));
    return m;
}

} // namespace

const KernelTable& scalar_table() noexcept {
    static const KernelTable table{matvec_scalar, matvec_transposed_scalar, dot_scalar, axpy_scalar,
                                   max_abs_diff_scalar};
    return table;
}

} // namespace glcoef::kernels::detail
