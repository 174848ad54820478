#include "fmrcc/kernels.hpp"

#include <atomic>

namespace fmrcc::kernels {

namespace {
std::atomic<bool> g_force_scalar{false};
const bool g_have_avx2 = avx2::available();

inline bool use_simd() { return g_have_avx2 && !g_force_scalar.load(std::memory_order_relaxed); }
}  // namespace

void force_scalar(bool on) { g_force_scalar.store(on, std::memory_order_relaxed); }
bool using_simd() { return use_simd(); }

double dot(const double* a, const double* b, std::size_t n) {
    return use_simd() ? avx2::dot(a, b, n) : scalar::dot(a, b, n);
}

void matvec_affine(const double* x, std::size_t n, std::size_t p,
                   const double* v, double v0, double* out) {
    if (use_simd()) avx2::matvec_affine(x, n, p, v, v0, out);
    else scalar::matvec_affine(x, n, p, v, v0, out);
}

void matvec_t_accum(const double* x, std::size_t n, std::size_t p,
                    const double* w, double* out) {
    if (use_simd()) avx2::matvec_t_accum(x, n, p, w, out);
    else scalar::matvec_t_accum(x, n, p, w, out);
}

double sum_sq_diff(const double* a, const double* b, std::size_t n) {
    return use_simd() ? avx2::sum_sq_diff(a, b, n) : scalar::sum_sq_diff(a, b, n);
}

}  // namespace fmrcc::kernels
