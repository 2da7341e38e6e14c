#pragma once

// Dense arithmetic kernels behind the transfer-operator iterations.
//
// Every kernel has a scalar reference implementation and, where the CPU offers
// it, a vector variant (AVX2+FMA on x86-64, NEON on AArch64). Dispatch happens
// once at start-up through a function table; GLCOEF_SIMD=scalar in the
// environment forces the reference path. The variants agree with the reference
// to rounding (they reassociate sums), which tests/test_kernels.cpp checks.

#include <cstddef>
#include <span>
#include <string_view>

namespace glcoef::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa) noexcept;

/// Best ISA supported by this CPU and build.
Isa detected_isa() noexcept;
bool isa_available(Isa isa) noexcept;

Isa active_isa() noexcept;
/// Switch the dispatch table. Throws DomainError if `isa` is unavailable.
void set_active_isa(Isa isa);

/// y = A x with A row-major rows x cols.
void matvec(std::span<const double> a, std::size_t rows, std::size_t cols,
            std::span<const double> x, std::span<double> y);

/// y = A^T x with A row-major rows x cols (x has `rows` entries, y has `cols`).
void matvec_transposed(std::span<const double> a, std::size_t rows, std::size_t cols,
                       std::span<const double> x, std::span<double> y);

double dot(std::span<const double> x, std::span<const double> y);

/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

/// max_i |x_i - y_i|
double max_abs_diff(std::span<const double> x, std::span<const double> y);

/// RAII guard that switches ISA for a scope (tests, benchmarks).
class ScopedIsa {
public:
    explicit ScopedIsa(Isa isa) : previous_(active_isa()) { set_active_isa(isa); }
    ~ScopedIsa() { set_active_isa(previous_); }
    ScopedIsa(const ScopedIsa&) = delete;
    ScopedIsa& operator=(const ScopedIsa&) = delete;

private:
    Isa previous_;
};

} // namespace glcoef::kernels
