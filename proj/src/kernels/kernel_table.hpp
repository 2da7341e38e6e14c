#pragma once

#include <cstddef>

namespace glcoef::kernels::detail {

struct KernelTable {
    void (*matvec)(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
    void (*matvec_transposed)(const double* a, std::size_t rows, std::size_t cols, const double* x,
                              double* y);
    double (*dot)(const double* x, const double* y, std::size_t n);
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    double (*max_abs_diff)(const double* x, const double* y, std::size_t n);
};

const KernelTable& scalar_table() noexcept;
#if defined(__x86_64__) || defined(_M_X64)
const KernelTable& avx2_table() noexcept;
#endif
#if defined(__aarch64__)
const KernelTable& neon_table() noexcept;
#endif

} // namespace glcoef::kernels::detail
