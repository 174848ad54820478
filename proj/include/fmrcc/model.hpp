#pragma once

#include <vector>

#include "fmrcc/types.hpp"

// Probability core: Gamma log-density in mean/dispersion form, log-link
// mean, mixture log-density, mixture CDF, and the penalized objective.
// All functions are pure; safe to call concurrently on shared data.

namespace fmrcc::model {

// Linear predictors larger than this in absolute value are rejected
// before exponentiation.
inline constexpr double kMaxLinearPredictor = 700.0;

double gamma_log_density(double y, const GammaParams& params);

// Gamma CDF in the same parameterization.
double gamma_cdf(double y, const GammaParams& params);

// exp(beta0 + x . beta); throws with the offending predictor on overflow.
double mean_from_linear_predictor(double beta0, const std::vector<double>& beta,
                                  const double* x);

// Per-component log densities log[f(y | mu_h(x), phi_h)], no weights.
std::vector<double> component_log_densities(double y, const double* x,
                                            const ParameterSet& params);

// log sum_h w_h f(y | mu_h(x), phi_h), via log-sum-exp.
double mixture_log_density(double y, const double* x, const ParameterSet& params);

// sum_h w_h F(y | mu_h(x), phi_h).
double mixture_cdf(double y, const double* x, const ParameterSet& params);

double log_likelihood(const Dataset& data, const ParameterSet& params);

// l_n(Psi) - gamma * sum_h w_h ||beta_h||^2
//          - (v/2) * sum_h sum_{j,k} w_h s_{j,k} |beta_{j,h} - beta_{k,h}|,
// the pairwise sum running over the full ordered double index set.
double penalized_objective(const Dataset& data, const ParameterSet& params,
                           const SimilarityMatrix& S, double gamma, double v);

}  // namespace fmrcc::model
