#include "glcoef/kernels.hpp"

#include "glcoef/types.hpp"
#include "kernel_table.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace glcoef::kernels {
namespace {

const detail::KernelTable& table_for(Isa isa) noexcept {
    switch (isa) {
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::avx2: return detail::avx2_table();
#endif
#if defined(__aarch64__)
    case Isa::neon: return detail::neon_table();
#endif
    default: return detail::scalar_table();
    }
}

Isa initial_isa() noexcept {
    if (const char* env = std::getenv("GLCOEF_SIMD")) {
        const std::string v(env);
        if (v == "scalar") return Isa::scalar;
    }
    return detected_isa();
}

std::atomic<Isa>& current() noexcept {
    static std::atomic<Isa> isa{initial_isa()};
    return isa;
}

const detail::KernelTable& active() noexcept { return table_for(current().load(std::memory_order_relaxed)); }

void check_sizes(bool ok, const char* what) {
    if (!ok) throw DomainError(std::string("kernel size mismatch in ") + what);
}

} // namespace

std::string_view isa_name(Isa isa) noexcept {
    switch (isa) {
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
    default: return "scalar";
    }
}

bool isa_available(Isa isa) noexcept {
    switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(__x86_64__) || defined(_M_X64)
        return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
        return false;
#endif
    case Isa::neon:
#if defined(__aarch64__)
        return true;
#else
        return false;
#endif
    }
    return false;
}

Isa detected_isa() noexcept {
    if (isa_available(Isa::avx2)) return Isa::avx2;
    if (isa_available(Isa::neon)) return Isa::neon;
    return Isa::scalar;
}

Isa active_isa() noexcept { return current().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
    if (!isa_available(isa))
        throw DomainError("SIMD variant '" + std::string(isa_name(isa)) + "' is not available on this CPU");
    current().store(isa, std::memory_order_relaxed);
}

void matvec(std::span<const double> a, std::size_t rows, std::size_t cols, std::span<const double> x,
            std::span<double> y) {
    check_sizes(a.size() == rows * cols && x.size() == cols && y.size() == rows, "matvec");
    active().matvec(a.data(), rows, cols, x.data(), y.data());
}

void matvec_transposed(std::span<const double> a, std::size_t rows, std::size_t cols,
                       std::span<const double> x, std::span<double> y) {
    check_sizes(a.size() == rows * cols && x.size() == rows && y.size() == cols, "matvec_transposed");
    active().matvec_transposed(a.data(), rows, cols, x.data(), y.data());
}

double dot(std::span<const double> x, std::span<const double> y) {
    check_sizes(x.size() == y.size(), "dot");
    return active().dot(x.data(), y.data(), x.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    check_sizes(x.size() == y.size(), "axpy");
    active().axpy(alpha, x.data(), y.data(), x.size());
}

double max_abs_diff(std::span<const double> x, std::span<const double> y) {
    check_sizes(x.size() == y.size(), "max_abs_diff");
    return active().max_abs_diff(x.data(), y.data(), x.size());
}

} // namespace glcoef::kernels
