#include "fmrcc/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fmrcc/mathfn.hpp"
#include "fmrcc/model.hpp"

namespace fmrcc::eval {

namespace {

constexpr double kCrpsTol = 1e-6;
constexpr double kTailMass = 1e-8;  // upper quadrature limit at the 1-kTailMass quantile

}  // namespace

double point_prediction(const double* x, const ParameterSet& params) {
    params.validate();
    double s = 0.0;
    for (std::size_t h = 0; h < params.num_components(); ++h) {
        const std::vector<double> beta = params.beta(h);
        s += params.weights[h] *
             model::mean_from_linear_predictor(params.intercepts[h], beta, x);
    }
    return s;
}

std::vector<double> point_predictions(const Dataset& data, const ParameterSet& params) {
    std::vector<double> out(data.n());
    for (std::size_t i = 0; i < data.n(); ++i)
        out[i] = point_prediction(data.design.row(i), params);
    return out;
}

double pseudo_r2(const std::vector<double>& y, const std::vector<double>& yhat) {
    if (y.size() != yhat.size() || y.empty())
        throw std::invalid_argument("pseudo_r2: length mismatch");
    const double ybar = std::accumulate(y.begin(), y.end(), 0.0) /
                        static_cast<double>(y.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!(y[i] > 0.0) || !(yhat[i] > 0.0))
            throw std::domain_error("pseudo_r2: values must be positive");
        num += std::log(y[i] / yhat[i]) - (y[i] - yhat[i]) / yhat[i];
        den += std::log(y[i] / ybar);
    }
    if (den == 0.0)
        throw std::domain_error("pseudo_r2: undefined, every response equals the mean");
    return 1.0 - num / den;
}

double mixture_quantile(double u, const double* x, const ParameterSet& params) {
    if (!(u > 0.0 && u < 1.0))
        throw std::domain_error("mixture_quantile: u must be in (0,1)");
    // Bracket, then bisect.
    double hi = 1.0;
    while (model::mixture_cdf(hi, x, params) < u) {
        hi *= 2.0;
        if (hi > 1e300) throw std::runtime_error("mixture_quantile: bracketing failed");
    }
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (model::mixture_cdf(mid, x, params) < u) lo = mid;
        else hi = mid;
    }
    return hi;
}

double crps(double y, const double* x, const ParameterSet& params) {
    if (!(y > 0.0)) throw std::domain_error("crps: y must be positive");
    params.validate();
    const auto cdf = [&](double z) { return model::mixture_cdf(z, x, params); };

    const double upper = std::max(y * (1.0 + 1e-9),
                                  mixture_quantile(1.0 - kTailMass, x, params));

    const auto below = [&](double z) {
        const double f = cdf(z);
        return f * f;
    };
    const auto above = [&](double z) {
        const double f = 1.0 - cdf(z);
        return f * f;
    };

    const mathfn::QuadratureResult lowq =
        mathfn::adaptive_simpson(below, 0.0, y, 0.5 * kCrpsTol);
    const mathfn::QuadratureResult highq =
        mathfn::adaptive_simpson(above, y, upper, 0.5 * kCrpsTol);
    if (!lowq.converged || !highq.converged)
        throw std::runtime_error("crps: quadrature did not converge, achieved " +
                                 std::to_string(lowq.achieved_tol + highq.achieved_tol));
    return lowq.value + highq.value;
}

double lift(const std::vector<double>& y, const std::vector<double>& yhat) {
    const std::size_t n = y.size();
    if (n < 10 || yhat.size() != n)
        throw std::invalid_argument("lift: need at least 10 matching observations");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return yhat[a] < yhat[b]; });

    // Ten contiguous groups, remainder spread over the first groups.
    const std::size_t base = n / 10;
    const std::size_t rem = n % 10;
    const std::size_t bottom_size = base + (rem > 0 ? 1 : 0);
    double bottom = 0.0;
    for (std::size_t i = 0; i < bottom_size; ++i) bottom += y[order[i]];
    bottom /= static_cast<double>(bottom_size);
    double top = 0.0;
    for (std::size_t i = n - base; i < n; ++i) top += y[order[i]];
    top /= static_cast<double>(base);
    return top / bottom;
}

std::vector<double> quantile_residuals(const Dataset& data, const ParameterSet& params,
                                       std::int64_t /*seed*/) {
    params.validate();
    std::vector<double> out(data.n());
    for (std::size_t i = 0; i < data.n(); ++i) {
        double u = model::mixture_cdf(data.responses[i], data.design.row(i), params);
        u = std::clamp(u, 1e-12, 1.0 - 1e-12);
        out[i] = mathfn::normal_quantile(u);
    }
    return out;
}

MetricReport report(const Dataset& data, const ParameterSet& params) {
    data.validate();
    params.validate();
    MetricReport rep{};
    rep.nll = -model::log_likelihood(data, params);

    const std::vector<double> yhat = point_predictions(data, params);
    rep.pseudo_r2 = pseudo_r2(data.responses, yhat);
    double mse = 0.0, mcrps = 0.0;
    for (std::size_t i = 0; i < data.n(); ++i) {
        const double d = data.responses[i] - yhat[i];
        mse += d * d;
        mcrps += crps(data.responses[i], data.design.row(i), params);
    }
    rep.mse = mse / static_cast<double>(data.n());
    rep.mcrps = mcrps / static_cast<double>(data.n());
    rep.lift = lift(data.responses, yhat);
    return rep;
}

}  // namespace fmrcc::eval
