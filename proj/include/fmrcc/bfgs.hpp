#pragma once

#include <functional>
#include <vector>

// Dense BFGS with backtracking Armijo line search. The objective returns
// the value and fills the gradient in one call.

namespace fmrcc {
class Matrix;
}

namespace fmrcc::bfgs {

struct Options {
    double grad_tol = 1e-6;    // infinity norm of the gradient
    int max_iter = 200;
    double armijo_c1 = 1e-4;
    double backtrack = 0.5;
    int max_backtracks = 60;
};

struct Result {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
    // Set when the line search could not reduce the objective; x then
    // holds the best iterate seen.
    bool stalled = false;
};

using Objective = std::function<double(const std::vector<double>& x,
                                       std::vector<double>& grad)>;

Result minimize(const Objective& f, std::vector<double> x0,
                const Options& opts = {});

// As above, but seeds the inverse-Hessian approximation from *hinv_io when
// its size matches and stores the final approximation back. Lets callers
// that repeatedly minimize slowly-changing objectives (proximal or ADMM
// inner problems) skip re-learning the curvature each time.
Result minimize(const Objective& f, std::vector<double> x0, const Options& opts,
                fmrcc::Matrix* hinv_io);

}  // namespace fmrcc::bfgs
