#pragma once

#include <cstddef>

// Dense inner-loop kernels. Scalar reference versions live in
// kernels::scalar; AVX2/FMA variants in kernels::avx2 (x86-64 only).
// The top-level entry points dispatch once at load time based on CPUID
// and can be forced to the scalar path for equivalence testing.

namespace fmrcc::kernels {

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
// out[i] = v0 + sum_j X[i*p + j] * v[j]   (X row-major, n x p)
void matvec_affine(const double* x, std::size_t n, std::size_t p,
                   const double* v, double v0, double* out);
// out[j] += sum_i w[i] * X[i*p + j]
void matvec_t_accum(const double* x, std::size_t n, std::size_t p,
                    const double* w, double* out);
double sum_sq_diff(const double* a, const double* b, std::size_t n);
}  // namespace scalar

namespace avx2 {
bool available();
double dot(const double* a, const double* b, std::size_t n);
void matvec_affine(const double* x, std::size_t n, std::size_t p,
                   const double* v, double v0, double* out);
void matvec_t_accum(const double* x, std::size_t n, std::size_t p,
                    const double* w, double* out);
double sum_sq_diff(const double* a, const double* b, std::size_t n);
}  // namespace avx2

// Dispatched entry points.
double dot(const double* a, const double* b, std::size_t n);
void matvec_affine(const double* x, std::size_t n, std::size_t p,
                   const double* v, double v0, double* out);
void matvec_t_accum(const double* x, std::size_t n, std::size_t p,
                    const double* w, double* out);
double sum_sq_diff(const double* a, const double* b, std::size_t n);

// Force the scalar path (or restore dispatch). Used by tests.
void force_scalar(bool on);
bool using_simd();

}  // namespace fmrcc::kernels
