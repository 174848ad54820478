#pragma once

#include <functional>

// Special functions and quadrature used across the library.

namespace fmrcc::mathfn {

// Digamma (psi) for x > 0, ~1e-14 relative accuracy.
double digamma(double x);

// Regularized lower incomplete gamma P(a, x) for a > 0, x >= 0.
double gamma_p(double a, double x);

// Standard normal quantile, Phi^{-1}(u) for u in (0, 1).
double normal_quantile(double u);

struct QuadratureResult {
    double value;
    double achieved_tol;
    bool converged;
};

// Adaptive Simpson on [a, b] with absolute-error target.
QuadratureResult adaptive_simpson(const std::function<double(double)>& f,
                                  double a, double b, double abs_tol,
                                  int max_depth = 40);

}  // namespace fmrcc::mathfn
