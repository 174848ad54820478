#include "fmrcc/bfgs.hpp"

#include <cmath>
#include <cstddef>

#include "fmrcc/kernels.hpp"
#include "fmrcc/types.hpp"

namespace fmrcc::bfgs {

namespace {

double inf_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

}  // namespace

Result minimize(const Objective& f, std::vector<double> x0, const Options& opts) {
    return minimize(f, std::move(x0), opts, nullptr);
}

Result minimize(const Objective& f, std::vector<double> x0, const Options& opts,
                Matrix* hinv_io) {
    const std::size_t d = x0.size();
    Result res;
    res.x = std::move(x0);

    std::vector<double> grad(d), grad_new(d), dir(d), x_new(d), s(d), yv(d), hy(d);
    double fx = f(res.x, grad);

    // Inverse Hessian approximation, identity start unless the caller
    // carried one over from a previous related minimization.
    Matrix hinv(d, d, 0.0);
    bool seeded = false;
    if (hinv_io != nullptr && hinv_io->rows() == d && hinv_io->cols() == d) {
        hinv = *hinv_io;
        seeded = true;
    } else {
        for (std::size_t i = 0; i < d; ++i) hinv(i, i) = 1.0;
    }

    int iter = 0;
    int no_progress = 0;
    for (; iter < opts.max_iter; ++iter) {
        if (inf_norm(grad) <= opts.grad_tol) {
            res.converged = true;
            break;
        }
        // dir = -Hinv * grad
        for (std::size_t i = 0; i < d; ++i)
            dir[i] = -kernels::dot(hinv.row(i), grad.data(), d);

        double slope = kernels::dot(dir.data(), grad.data(), d);
        if (slope >= 0.0) {
            // Not a descent direction; reset to steepest descent.
            for (std::size_t i = 0; i < d; ++i) {
                hinv.row(i)[i] = 1.0;
                for (std::size_t j = 0; j < d; ++j)
                    if (j != i) hinv(i, j) = 0.0;
                dir[i] = -grad[i];
            }
            slope = kernels::dot(dir.data(), grad.data(), d);
        }

        // Identity scaling makes the first trial step as long as the
        // gradient; cap it so the line search starts near the iterate.
        double step = 1.0;
        if (iter == 0 && !seeded) {
            const double dn = std::sqrt(kernels::dot(dir.data(), dir.data(), d));
            if (dn > 1.0) step = 1.0 / dn;
        }
        // At the floating-point noise floor of f no line search can make
        // measurable progress; stop instead of spinning until max_iter.
        if (-slope <= 1e-15 * std::max(1.0, std::fabs(fx))) break;

        double fx_new = fx;
        bool accepted = false;
        for (int bt = 0; bt < opts.max_backtracks; ++bt) {
            for (std::size_t i = 0; i < d; ++i) x_new[i] = res.x[i] + step * dir[i];
            bool ok = true;
            try {
                fx_new = f(x_new, grad_new);
            } catch (const std::overflow_error&) {
                ok = false;
            }
            if (ok && std::isfinite(fx_new) &&
                fx_new <= fx + opts.armijo_c1 * step * slope) {
                accepted = true;
                break;
            }
            step *= opts.backtrack;
        }
        if (!accepted) {
            res.stalled = true;
            break;
        }

        for (std::size_t i = 0; i < d; ++i) {
            s[i] = x_new[i] - res.x[i];
            yv[i] = grad_new[i] - grad[i];
        }
        const double sy = kernels::dot(s.data(), yv.data(), d);
        if (sy > 1e-12) {
            if (iter == 0 && !seeded) {
                // Rescale the initial inverse Hessian to the curvature seen
                // in the first step (Nocedal & Wright eq. 6.20).
                const double yy = kernels::dot(yv.data(), yv.data(), d);
                if (yy > 0.0) {
                    const double scale = sy / yy;
                    for (std::size_t i = 0; i < d; ++i) hinv(i, i) = scale;
                }
            }
            // BFGS inverse update: H <- (I - s y'/sy) H (I - y s'/sy) + s s'/sy
            for (std::size_t i = 0; i < d; ++i)
                hy[i] = kernels::dot(hinv.row(i), yv.data(), d);
            const double yhy = kernels::dot(yv.data(), hy.data(), d);
            const double c = (1.0 + yhy / sy) / sy;
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j)
                    hinv(i, j) += c * s[i] * s[j] -
                                  (hy[i] * s[j] + s[i] * hy[j]) / sy;
        }

        const double progress = fx - fx_new;
        res.x = x_new;
        fx = fx_new;
        grad.swap(grad_new);
        if (progress <= 1e-14 * std::max(1.0, std::fabs(fx))) {
            if (++no_progress >= 2) {
                ++iter;
                break;
            }
        } else {
            no_progress = 0;
        }
    }

    res.value = fx;
    res.iterations = iter;
    if (!res.converged && !res.stalled && inf_norm(grad) <= opts.grad_tol)
        res.converged = true;
    if (hinv_io != nullptr) *hinv_io = hinv;
    return res;
}

}  // namespace fmrcc::bfgs
