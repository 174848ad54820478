#include "fmrcc/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "fmrcc/kernels.hpp"
#include "fmrcc/mathfn.hpp"

namespace fmrcc::model {

double gamma_log_density(double y, const GammaParams& params) {
    params.validate();
    if (!(y > 0.0)) throw std::domain_error("gamma_log_density: y must be positive");
    const double shape = params.shape();
    const double scale = params.scale();
    return (shape - 1.0) * std::log(y) - y / scale - shape * std::log(scale) -
           std::lgamma(shape);
}

double gamma_cdf(double y, const GammaParams& params) {
    params.validate();
    if (y <= 0.0) return 0.0;
    return mathfn::gamma_p(params.shape(), y / params.scale());
}

double mean_from_linear_predictor(double beta0, const std::vector<double>& beta,
                                  const double* x) {
    const double eta = beta0 + kernels::dot(beta.data(), x, beta.size());
    if (!(std::fabs(eta) <= kMaxLinearPredictor))
        throw std::overflow_error("mean_from_linear_predictor: linear predictor " +
                                  std::to_string(eta) + " exceeds exp() range");
    return std::exp(eta);
}

std::vector<double> component_log_densities(double y, const double* x,
                                            const ParameterSet& params) {
    const std::size_t H = params.num_components();
    std::vector<double> out(H);
    for (std::size_t h = 0; h < H; ++h) {
        const std::vector<double> beta = params.beta(h);
        const double mu = mean_from_linear_predictor(params.intercepts[h], beta, x);
        out[h] = gamma_log_density(y, {mu, params.dispersions[h]});
    }
    return out;
}

double mixture_log_density(double y, const double* x, const ParameterSet& params) {
    params.validate();
    const std::vector<double> ld = component_log_densities(y, x, params);
    const std::size_t H = ld.size();
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t h = 0; h < H; ++h)
        mx = std::max(mx, std::log(params.weights[h]) + ld[h]);
    if (!std::isfinite(mx)) return mx;
    double s = 0.0;
    for (std::size_t h = 0; h < H; ++h)
        s += std::exp(std::log(params.weights[h]) + ld[h] - mx);
    return mx + std::log(s);
}

double mixture_cdf(double y, const double* x, const ParameterSet& params) {
    params.validate();
    const std::size_t H = params.num_components();
    double s = 0.0;
    for (std::size_t h = 0; h < H; ++h) {
        const std::vector<double> beta = params.beta(h);
        const double mu = mean_from_linear_predictor(params.intercepts[h], beta, x);
        s += params.weights[h] * gamma_cdf(y, {mu, params.dispersions[h]});
    }
    return s;
}

double log_likelihood(const Dataset& data, const ParameterSet& params) {
    double s = 0.0;
    for (std::size_t i = 0; i < data.n(); ++i)
        s += mixture_log_density(data.responses[i], data.design.row(i), params);
    return s;
}

double penalized_objective(const Dataset& data, const ParameterSet& params,
                           const SimilarityMatrix& S, double gamma, double v) {
    params.validate();
    const std::size_t p = params.num_covariates();
    if (data.p() != p || S.p() != p)
        throw std::invalid_argument("penalized_objective: dimension mismatch");

    double obj = log_likelihood(data, params);
    const std::size_t H = params.num_components();
    for (std::size_t h = 0; h < H; ++h) {
        const std::vector<double> beta = params.beta(h);
        const double ridge = kernels::dot(beta.data(), beta.data(), p);
        obj -= gamma * params.weights[h] * ridge;
        double fused = 0.0;
        for (std::size_t j = 0; j < p; ++j)
            for (std::size_t k = 0; k < p; ++k)
                fused += S(j, k) * std::fabs(beta[j] - beta[k]);
        obj -= 0.5 * v * params.weights[h] * fused;
    }
    return obj;
}

}  // namespace fmrcc::model
