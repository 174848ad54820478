#include "fmrcc/kernels.hpp"

#if defined(FMRCC_HAVE_AVX2_BUILD)
#include <immintrin.h>
#endif

namespace fmrcc::kernels::avx2 {

#if defined(FMRCC_HAVE_AVX2_BUILD)

bool available() {
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

namespace {

inline double hsum4(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
    }
    double s = hsum4(acc);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void matvec_affine(const double* x, std::size_t n, std::size_t p,
                   const double* v, double v0, double* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = v0 + dot(x + i * p, v, p);
}

void matvec_t_accum(const double* x, std::size_t n, std::size_t p,
                    const double* w, double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        const __m256d wi = _mm256_set1_pd(w[i]);
        const double* row = x + i * p;
        std::size_t j = 0;
        for (; j + 4 <= p; j += 4) {
            __m256d o = _mm256_loadu_pd(out + j);
            o = _mm256_fmadd_pd(wi, _mm256_loadu_pd(row + j), o);
            _mm256_storeu_pd(out + j, o);
        }
        for (; j < p; ++j) out[j] += w[i] * row[j];
    }
}

double sum_sq_diff(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    double s = hsum4(acc);
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

#else  // non-x86 build: stubs, dispatcher never selects these

bool available() { return false; }
double dot(const double* a, const double* b, std::size_t n) {
    return scalar::dot(a, b, n);
}
void matvec_affine(const double* x, std::size_t n, std::size_t p,
                   const double* v, double v0, double* out) {
    scalar::matvec_affine(x, n, p, v, v0, out);
}
void matvec_t_accum(const double* x, std::size_t n, std::size_t p,
                    const double* w, double* out) {
    scalar::matvec_t_accum(x, n, p, w, out);
}
double sum_sq_diff(const double* a, const double* b, std::size_t n) {
    return scalar::sum_sq_diff(a, b, n);
}

#endif

}  // namespace fmrcc::kernels::avx2
