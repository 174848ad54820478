#pragma once

#include <cstdint>
#include <vector>

#include "fmrcc/types.hpp"

// Out-of-sample evaluation: NLL, deviance pseudo R^2, MSE, CRPS/MCRPS,
// decile lift, and quantile residuals for QQ diagnostics.

namespace fmrcc::eval {

struct MetricReport {
    double nll;
    double pseudo_r2;
    double mse;
    double mcrps;
    double lift;
};

// sum_h w_h * mu_h(x)
double point_prediction(const double* x, const ParameterSet& params);

std::vector<double> point_predictions(const Dataset& data, const ParameterSet& params);

// 1 - sum[log(y/yhat) - (y-yhat)/yhat] / sum[log(y/ybar)]
double pseudo_r2(const std::vector<double>& y, const std::vector<double>& yhat);

// Integral form of the CRPS for the mixture Gamma forecast, by adaptive
// quadrature split at y; absolute error target 1e-6.
double crps(double y, const double* x, const ParameterSet& params);

// mean(y in top prediction decile) / mean(y in bottom decile); groups as
// equal as possible with the remainder spread over the first (lowest) groups.
double lift(const std::vector<double>& y, const std::vector<double>& yhat);

// r_i = Phi^{-1}(F(y_i | x_i)); the seed is reserved for randomized
// residuals under discrete families and is unused here.
std::vector<double> quantile_residuals(const Dataset& data, const ParameterSet& params,
                                       std::int64_t seed = 0);

// Smallest y with mixture CDF >= u.
double mixture_quantile(double u, const double* x, const ParameterSet& params);

MetricReport report(const Dataset& data, const ParameterSet& params);

}  // namespace fmrcc::eval
