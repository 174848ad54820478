#include "fmrcc/kernels.hpp"

namespace fmrcc::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

void matvec_affine(const double* x, std::size_t n, std::size_t p,
                   const double* v, double v0, double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = x + i * p;
        double s = v0;
        for (std::size_t j = 0; j < p; ++j) s += row[j] * v[j];
        out[i] = s;
    }
}

void matvec_t_accum(const double* x, std::size_t n, std::size_t p,
                    const double* w, double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        const double wi = w[i];
        const double* row = x + i * p;
        for (std::size_t j = 0; j < p; ++j) out[j] += wi * row[j];
    }
}

double sum_sq_diff(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

}  // namespace fmrcc::kernels::scalar
