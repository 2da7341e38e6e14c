// AArch64 only; Advanced SIMD is architecturally mandatory there.
#include "kernel_table.hpp"

#include <arm_neon.h>

#include <cmath>

namespace glcoef::kernels::detail {
namespace {

double dot_neon(const double* x, const double* y, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0), acc1 = vdupq_n_f64(0.0);
    float64x2_t acc2 = vdupq_n_f64(0.0), acc3 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(x + i), vld1q_f64(y + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
        acc2 = vfmaq_f64(acc2, vld1q_f64(x + i + 4), vld1q_f64(y + i + 4));
        acc3 = vfmaq_f64(acc3, vld1q_f64(x + i + 6), vld1q_f64(y + i + 6));
    }
    for (; i + 2 <= n; i += 2) acc0 = vfmaq_f64(acc0, vld1q_f64(x + i), vld1q_f64(y + i));
    double s = vaddvq_f64(vaddq_f64(vaddq_f64(acc0, acc1), vaddq_f64(acc2, acc3)));
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
    const float64x2_t a = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), a, vld1q_f64(x + i)));
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void matvec_neon(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
    for (std::size_t i = 0; i < rows; ++i) y[i] = dot_neon(a + i * cols, x, cols);
}

void matvec_transposed_neon(const double* a, std::size_t rows, std::size_t cols, const double* x,
                            double* y) {
    for (std::size_t j = 0; j < cols; ++j) y[j] = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
        if (x[i] != 0.0) axpy_neon(x[i], a + i * cols, y, cols);
    }
}

double max_abs_diff_neon(const double* x, const double* y, std::size_t n) {
    float64x2_t m = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) m = vmaxq_f64(m, vabdq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
    double r = vmaxvq_f64(m);
    for (; i < n; ++i) r = std::fmax(r, std::abs(x[i] - y[i]));
    return r;
}

} // namespace

const KernelTable& neon_table() noexcept {
    static const KernelTable table{matvec_neon, matvec_transposed_neon, dot_neon, axpy_neon,
                                   max_abs_diff_neon};
    return table;
}

} // namespace glcoef::kernels::detail
