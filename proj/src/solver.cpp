#include "fmrcc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include "fmrcc/kernels.hpp"
#include "fmrcc/mathfn.hpp"
#include "fmrcc/model.hpp"

namespace fmrcc::solver {

namespace {

constexpr double kWeightFloor = 1e-6;  // below this a component is frozen
constexpr double kMaxLogPhi = 20.0;

double frobenius_diff(const Matrix& a, const Matrix& b) {
    return std::sqrt(kernels::sum_sq_diff(a.data(), b.data(), a.rows() * a.cols()));
}

}  // namespace

Responsibilities e_step(const Dataset& data, const ParameterSet& params) {
    params.validate();
    const std::size_t n = data.n();
    const std::size_t H = params.num_components();
    Matrix pi(n, H);
    std::vector<double> logw(H);
    for (std::size_t h = 0; h < H; ++h) logw[h] = std::log(params.weights[h]);

    for (std::size_t i = 0; i < n; ++i) {
        const std::vector<double> ld =
            model::component_log_densities(data.responses[i], data.design.row(i), params);
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t h = 0; h < H; ++h) mx = std::max(mx, logw[h] + ld[h]);
        if (!std::isfinite(mx))
            throw std::runtime_error("e_step: all component densities vanish at row " +
                                     std::to_string(i));
        double denom = 0.0;
        for (std::size_t h = 0; h < H; ++h) {
            pi(i, h) = std::exp(logw[h] + ld[h] - mx);
            denom += pi(i, h);
        }
        for (std::size_t h = 0; h < H; ++h) pi(i, h) /= denom;
    }
    return {std::move(pi)};
}

std::vector<double> update_weights(const Responsibilities& resp) {
    const std::size_t n = resp.pi.rows();
    const std::size_t H = resp.pi.cols();
    std::vector<double> w(H, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t h = 0; h < H; ++h) w[h] += resp.pi(i, h);
    for (std::size_t h = 0; h < H; ++h) w[h] /= static_cast<double>(n);
    return w;
}

bfgs::Objective make_component_objective(const Dataset& data,
                                         const std::vector<double>& pi_h,
                                         const Matrix& z, const Matrix& r,
                                         double weight, double gamma, double rho) {
    const std::size_t n = data.n();
    const std::size_t p = data.p();

    // Per-observation log responses and the z/r aggregates, fixed for the
    // lifetime of one beta step.
    auto log_y = std::make_shared<std::vector<double>>(n);
    for (std::size_t i = 0; i < n; ++i) (*log_y)[i] = std::log(data.responses[i]);

    auto row_c = std::make_shared<std::vector<double>>(p, 0.0);  // sum_k (z_jk + r_jk)
    double c2 = 0.0;                                             // sum_jk (z_jk + r_jk)^2
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t k = 0; k < p; ++k) {
            const double c = z(j, k) + r(j, k);
            (*row_c)[j] += c;
            c2 += c * c;
        }

    const double* y = data.responses.data();
    const double* x = data.design.data();
    const double* pi = pi_h.data();
    const double pd = static_cast<double>(p);

    return [=, &data](const std::vector<double>& xv, std::vector<double>& grad) -> double {
        const double beta0 = xv[0];
        const double* beta = xv.data() + 1;
        const double lphi = xv[p + 1];
        grad.assign(p + 2, 0.0);
        if (std::fabs(lphi) > kMaxLogPhi)
            return std::numeric_limits<double>::infinity();

        const double shape = std::exp(-2.0 * lphi);
        const double log_shape = -2.0 * lphi;
        const double lgam = std::lgamma(shape);
        const double psi = mathfn::digamma(shape);

        std::vector<double> eta(n);
        kernels::matvec_affine(x, n, p, beta, beta0, eta.data());

        double nll = 0.0;
        double sum_wres = 0.0;   // sum_i pi_i * shape * (y_i - mu_i)/mu_i
        double sum_dlda = 0.0;   // sum_i pi_i * d log f / d shape
        std::vector<double> wres(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (!(std::fabs(eta[i]) <= model::kMaxLinearPredictor))
                throw std::overflow_error("component objective: linear predictor overflow");
            const double mu = std::exp(eta[i]);
            const double ratio = y[i] / mu;
            const double ll = (shape - 1.0) * (*log_y)[i] - shape * ratio +
                              shape * log_shape - shape * eta[i] - lgam;
            nll -= pi[i] * ll;
            wres[i] = pi[i] * shape * (ratio - 1.0);
            sum_wres += wres[i];
            sum_dlda += pi[i] * ((*log_y)[i] - ratio + log_shape + 1.0 - eta[i] - psi);
        }

        // Gradient of the weighted negative log-likelihood.
        grad[0] = -sum_wres;
        kernels::matvec_t_accum(x, n, p, wres.data(), grad.data() + 1);
        for (std::size_t j = 0; j < p; ++j) grad[1 + j] = -grad[1 + j];
        grad[p + 1] = 2.0 * shape * sum_dlda;

        // Ridge and ADMM quadratic.
        double value = nll;
        const double ridge = weight * gamma;
        double bb = 0.0, bc = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
            bb += beta[j] * beta[j];
            bc += beta[j] * (*row_c)[j];
            grad[1 + j] += 2.0 * ridge * beta[j] -
                           rho * ((*row_c)[j] - pd * beta[j]);
        }
        value += ridge * bb + 0.5 * rho * (c2 - 2.0 * bc + pd * bb);
        return value;
    };
}

ComponentParams admm_beta_step(const Dataset& data, const std::vector<double>& pi_h,
                               const Matrix& z, const Matrix& r,
                               const ComponentParams& current, double weight,
                               const FitConfig& config) {
    return admm_beta_step(data, pi_h, z, r, current, weight, config, nullptr);
}

ComponentParams admm_beta_step(const Dataset& data, const std::vector<double>& pi_h,
                               const Matrix& z, const Matrix& r,
                               const ComponentParams& current, double weight,
                               const FitConfig& config, Matrix* hinv_io) {
    const std::size_t p = data.p();
    if (current.beta.size() != p || z.rows() != p || z.cols() != p)
        throw std::invalid_argument("admm_beta_step: dimension mismatch");

    auto obj = make_component_objective(data, pi_h, z, r, weight, config.gamma, config.rho);
    std::vector<double> x0(p + 2);
    x0[0] = current.beta0;
    std::copy(current.beta.begin(), current.beta.end(), x0.begin() + 1);
    x0[p + 1] = std::log(current.phi);

    const bfgs::Result res = bfgs::minimize(obj, std::move(x0), {}, hinv_io);

    ComponentParams out;
    out.beta0 = res.x[0];
    out.beta.assign(res.x.begin() + 1, res.x.begin() + 1 + p);
    out.phi = std::exp(res.x[p + 1]);
    out.warned = res.stalled;
    return out;
}

Matrix admm_z_step(const std::vector<double>& beta, const Matrix& r,
                   const SimilarityMatrix& S, double weight, double v, double rho) {
    if (!(rho > 0.0)) throw std::invalid_argument("admm_z_step: rho must be positive");
    const std::size_t p = beta.size();
    Matrix z(p, p);
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t k = j; k < p; ++k) {
            const double a = beta[j] - r(j, k);
            const double b = beta[k] - r(k, j);
            const double d = std::fabs(a - b);
            const double theta =
                d == 0.0 ? 0.5 : std::max(1.0 - weight * v * S(j, k) / (rho * d), 0.5);
            z(j, k) = theta * a + (1.0 - theta) * b;
            z(k, j) = (1.0 - theta) * a + theta * b;
        }
    }
    return z;
}

Matrix admm_r_step(const Matrix& r, const Matrix& z, const std::vector<double>& beta) {
    const std::size_t p = beta.size();
    if (r.rows() != p || z.rows() != p)
        throw std::invalid_argument("admm_r_step: dimension mismatch");
    Matrix out(p, p);
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t k = 0; k < p; ++k)
            out(j, k) = r(j, k) + (z(j, k) - beta[j]);
    return out;
}

Residuals admm_residuals(const Matrix& z_now, const Matrix& r_now,
                         const Matrix& z_prev, const Matrix& r_prev, double rho) {
    return {frobenius_diff(r_now, r_prev), rho * frobenius_diff(z_now, z_prev)};
}

double augmented_lagrangian(const Dataset& data, const std::vector<double>& pi_h,
                            const ComponentParams& cp, const Matrix& z,
                            const Matrix& r, const SimilarityMatrix& S,
                            double weight, double gamma, double v, double rho) {
    const std::size_t n = data.n();
    const std::size_t p = data.p();
    double val = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double mu =
            model::mean_from_linear_predictor(cp.beta0, cp.beta, data.design.row(i));
        val -= pi_h[i] * model::gamma_log_density(data.responses[i], {mu, cp.phi});
    }
    double bb = 0.0;
    for (std::size_t j = 0; j < p; ++j) bb += cp.beta[j] * cp.beta[j];
    val += weight * gamma * bb;
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t k = 0; k < p; ++k) {
            val += 0.5 * weight * v * S(j, k) * std::fabs(z(j, k) - z(k, j));
            const double q = z(j, k) - cp.beta[j] + r(j, k);
            val += 0.5 * rho * q * q;
        }
    return val;
}

namespace {

struct ComponentOutcome {
    ComponentParams params;
    Matrix z;
    Matrix r;
    ComponentTrace trace;
};

ComponentOutcome run_component(const Dataset& data, const SimilarityMatrix& S,
                               const std::vector<double>& pi_h, double weight,
                               const ComponentParams& start, const FitConfig& config) {
    const std::size_t p = data.p();
    ComponentOutcome out;
    out.params = start;

    double effective = 0.0;
    for (double w : pi_h) effective += w;
    const bool degenerate = weight < kWeightFloor || effective < static_cast<double>(p);

    // Step 1: z_{j,k} = beta_j, r = 0.
    out.z = Matrix(p, p);
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t k = 0; k < p; ++k) out.z(j, k) = start.beta[j];
    out.r = Matrix(p, p, 0.0);

    if (degenerate) {
        out.trace.frozen = true;
        return out;
    }

    Matrix hinv;  // curvature carried across the warm-started beta steps
    for (int t = 0; t < config.max_admm; ++t) {
        ComponentParams next =
            admm_beta_step(data, pi_h, out.z, out.r, out.params, weight, config, &hinv);
        out.trace.warned = out.trace.warned || next.warned;
        Matrix z_new = admm_z_step(next.beta, out.r, S, weight, config.v, config.rho);
        Matrix r_new = admm_r_step(out.r, z_new, next.beta);
        const Residuals res = admm_residuals(z_new, r_new, out.z, out.r, config.rho);

        out.params = std::move(next);
        out.z = std::move(z_new);
        out.r = std::move(r_new);
        out.trace.pri = res.pri;
        out.trace.dual = res.dual;
        out.trace.admm_iterations = t + 1;
        out.trace.aug_lagrangian.push_back(
            augmented_lagrangian(data, pi_h, out.params, out.z, out.r, S, weight,
                                 config.gamma, config.v, config.rho));

        if (res.pri <= config.eps_pri && res.dual <= config.eps_dual) break;
    }
    return out;
}

}  // namespace

FitResult fit(const Dataset& data, const SimilarityMatrix& S, std::size_t H,
              const FitConfig& config, const ParameterSet& init) {
    config.validate();
    init.validate();
    data.validate();
    S.validate();
    if (H < 1 || init.num_components() != H)
        throw std::invalid_argument("fit: H must match the initial parameter set");
    const std::size_t p = data.p();
    if (init.num_covariates() != p || S.p() != p)
        throw std::invalid_argument("fit: covariate dimensions disagree");

    FitResult result;
    result.params = init;
    result.state.z.assign(H, Matrix(p, p));
    result.state.r.assign(H, Matrix(p, p));

    try {
        for (int m = 0; m < config.max_em; ++m) {
            const Responsibilities resp = e_step(data, result.params);
            const std::vector<double> w = update_weights(resp);
            const Matrix coef_prev = result.params.coefficients;

            std::vector<ComponentParams> starts(H);
            std::vector<std::vector<double>> pi_cols(H);
            for (std::size_t h = 0; h < H; ++h) {
                starts[h] = {result.params.intercepts[h], result.params.beta(h),
                             result.params.dispersions[h]};
                pi_cols[h] = resp.pi.col(h);
            }

            std::vector<ComponentOutcome> outcomes(H);
            if (config.parallel_components && H > 1) {
                std::vector<std::future<ComponentOutcome>> futs;
                futs.reserve(H);
                for (std::size_t h = 0; h < H; ++h)
                    futs.push_back(std::async(std::launch::async, run_component,
                                              std::cref(data), std::cref(S),
                                              std::cref(pi_cols[h]), w[h],
                                              std::cref(starts[h]), std::cref(config)));
                for (std::size_t h = 0; h < H; ++h) outcomes[h] = futs[h].get();
            } else {
                for (std::size_t h = 0; h < H; ++h)
                    outcomes[h] = run_component(data, S, pi_cols[h], w[h], starts[h], config);
            }

            result.params.weights = w;
            for (std::size_t h = 0; h < H; ++h) {
                result.params.intercepts[h] = outcomes[h].params.beta0;
                result.params.dispersions[h] = outcomes[h].params.phi;
                for (std::size_t j = 0; j < p; ++j)
                    result.params.coefficients(j, h) = outcomes[h].params.beta[j];
                result.state.z[h] = std::move(outcomes[h].z);
                result.state.r[h] = std::move(outcomes[h].r);
            }

            EmIterationRecord rec;
            rec.coef_change_norm = frobenius_diff(result.params.coefficients, coef_prev);
            rec.penalized_objective =
                model::penalized_objective(data, result.params, S, config.gamma, config.v);
            for (std::size_t h = 0; h < H; ++h)
                rec.components.push_back(std::move(outcomes[h].trace));
            result.trace.push_back(std::move(rec));

            if (result.trace.back().coef_change_norm < config.eps_em) {
                result.converged = true;
                break;
            }
        }
    } catch (const FitError&) {
        throw;
    } catch (const std::exception& e) {
        throw FitError(e.what(), result.trace);
    }

    result.em_iterations = static_cast<int>(result.trace.size());
    return result;
}

}  // namespace fmrcc::solver
