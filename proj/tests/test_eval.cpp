#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "fmrcc/eval.hpp"
#include "fmrcc/mathfn.hpp"
#include "fmrcc/model.hpp"
#include "fmrcc/simgen.hpp"

using namespace fmrcc;

namespace {

ParameterSet single_component(double mu_log, double phi, std::size_t p) {
    ParameterSet ps;
    ps.weights = {1.0};
    ps.intercepts = {mu_log};
    ps.dispersions = {phi};
    ps.coefficients = Matrix(p, 1, 0.0);
    return ps;
}

// Closed-form CRPS of a Gamma(shape alpha, rate beta) forecast.
double gamma_crps_closed_form(double y, double alpha, double rate) {
    const double f1 = mathfn::gamma_p(alpha, rate * y);
    const double f2 = mathfn::gamma_p(alpha + 1.0, rate * y);
    const double log_b = 0.5 * std::log(M_PI) + std::lgamma(alpha) -
                         std::lgamma(alpha + 0.5);  // log Beta(1/2, alpha)
    return y * (2.0 * f1 - 1.0) - (alpha / rate) * (2.0 * f2 - 1.0) -
           std::exp(-std::log(rate) - log_b);
}

}  // namespace

TEST_CASE("point prediction mixes the component means") {
    const auto truth = simgen::reference_truth();
    const std::vector<double> zero(10, 0.0);
    // At x = 0 the means are e^1 and e^2.
    CHECK(eval::point_prediction(zero.data(), truth) ==
          doctest::Approx(0.7 * std::exp(1.0) + 0.3 * std::exp(2.0)).epsilon(1e-14));
}

TEST_CASE("pseudo r2 identities") {
    const std::vector<double> y{1.0, 2.0, 3.0, 4.0};

    SUBCASE("perfect predictions give one") {
        CHECK(eval::pseudo_r2(y, y) == doctest::Approx(1.0).epsilon(1e-15));
    }

    SUBCASE("predicting the mean gives zero") {
        // ybar = 2.5 exactly, and sum(y - ybar) = 0 exactly in binary.
        const std::vector<double> yhat(4, 2.5);
        CHECK(eval::pseudo_r2(y, yhat) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
    }

    SUBCASE("worse than the mean goes negative") {
        const std::vector<double> yhat{4.0, 3.0, 2.0, 1.0};
        CHECK(eval::pseudo_r2(y, yhat) < 0.0);
    }

    SUBCASE("constant responses are rejected") {
        const std::vector<double> flat(4, 2.0);
        CHECK_THROWS_AS(eval::pseudo_r2(flat, y), std::domain_error);
    }

    SUBCASE("positivity is enforced") {
        CHECK_THROWS_AS(eval::pseudo_r2({1.0, -1.0}, {1.0, 1.0}), std::domain_error);
    }
}

TEST_CASE("crps matches the gamma closed form on a grid") {
    for (double mu : {0.5, 1.5, 3.0}) {
        for (double phi : {0.3, 0.6, 1.0}) {
            const auto ps = single_component(std::log(mu), phi, 2);
            const double alpha = 1.0 / (phi * phi);
            const double rate = alpha / mu;
            const std::vector<double> x{0.0, 0.0};
            for (double frac : {0.4, 1.0, 2.3}) {
                const double y = frac * mu;
                CHECK(eval::crps(y, x.data(), ps) ==
                      doctest::Approx(gamma_crps_closed_form(y, alpha, rate))
                          .scale(1.0)
                          .epsilon(5e-6));
            }
        }
    }
}

TEST_CASE("crps matches the expectation identity for a mixture") {
    const auto truth = simgen::reference_truth();
    const std::vector<double> x(10, 0.1);
    const double y = 3.0;
    const double val = eval::crps(y, x.data(), truth);

    // CRPS = E|Y - y| - E|Y - Y'|/2 with Y, Y' iid from the forecast.
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const std::size_t m = 400000;
    std::vector<double> mu(2);
    for (std::size_t h = 0; h < 2; ++h)
        mu[h] = model::mean_from_linear_predictor(truth.intercepts[h], truth.beta(h),
                                                  x.data());
    const auto draw = [&]() {
        const std::size_t h = u01(rng) < truth.weights[0] ? 0 : 1;
        return simgen::gamma_rng(mu[h], truth.dispersions[h], rng);
    };

    double s1 = 0.0, s1sq = 0.0, s2 = 0.0, s2sq = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double a = std::fabs(draw() - y);
        s1 += a;
        s1sq += a * a;
        const double b = std::fabs(draw() - draw());
        s2 += b;
        s2sq += b * b;
    }
    const double m1 = s1 / m, m2 = s2 / m;
    const double v1 = s1sq / m - m1 * m1, v2 = s2sq / m - m2 * m2;
    const double est = m1 - 0.5 * m2;
    const double se = std::sqrt(v1 / m + 0.25 * v2 / m);
    CHECK(std::fabs(val - est) < 3.0 * se);
}

TEST_CASE("crps input validation") {
    const auto ps = single_component(0.0, 0.5, 1);
    const double x = 0.0;
    CHECK_THROWS_AS(eval::crps(0.0, &x, ps), std::domain_error);
    CHECK_THROWS_AS(eval::crps(-1.0, &x, ps), std::domain_error);
}

TEST_CASE("mixture quantile inverts the mixture cdf") {
    const auto truth = simgen::reference_truth();
    const std::vector<double> x(10, -0.2);
    for (double u : {0.01, 0.25, 0.5, 0.9, 0.999}) {
        const double q = eval::mixture_quantile(u, x.data(), truth);
        CHECK(model::mixture_cdf(q, x.data(), truth) == doctest::Approx(u).epsilon(1e-9));
    }
    CHECK_THROWS_AS(eval::mixture_quantile(0.0, x.data(), truth), std::domain_error);
    CHECK_THROWS_AS(eval::mixture_quantile(1.0, x.data(), truth), std::domain_error);
}

TEST_CASE("decile lift") {
    std::vector<double> y(100);
    std::iota(y.begin(), y.end(), 1.0);

    SUBCASE("comonotone integer ramp") {
        CHECK(eval::lift(y, y) == doctest::Approx(95.5 / 5.5).epsilon(1e-14));
    }

    SUBCASE("reversed predictions give the reciprocal") {
        std::vector<double> rev(100);
        for (std::size_t i = 0; i < 100; ++i) rev[i] = -y[i];
        CHECK(eval::lift(y, rev) == doctest::Approx(5.5 / 95.5).epsilon(1e-14));
    }

    SUBCASE("remainder enlarges the bottom group") {
        // n = 101: bottom group has 11 members, top keeps 10.
        std::vector<double> y2(101);
        std::iota(y2.begin(), y2.end(), 1.0);
        const double bottom = (1.0 + 11.0) / 2.0;  // mean of 1..11
        const double top = (92.0 + 101.0) / 2.0;   // mean of 92..101
        CHECK(eval::lift(y2, y2) == doctest::Approx(top / bottom).epsilon(1e-14));
    }

    SUBCASE("comonotone implies lift at least one") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> u(0.5, 20.0);
        for (int trial = 0; trial < 10; ++trial) {
            std::vector<double> ys(37);
            for (double& v : ys) v = u(rng);
            std::vector<double> yh(37);
            for (std::size_t i = 0; i < 37; ++i) yh[i] = 2.0 * ys[i] + 1.0;
            CHECK(eval::lift(ys, yh) >= 1.0);
        }
    }

    SUBCASE("needs at least ten observations") {
        std::vector<double> tiny(9, 1.0);
        CHECK_THROWS_AS(eval::lift(tiny, tiny), std::invalid_argument);
    }
}

TEST_CASE("quantile residuals are standard normal under the truth") {
    simgen::SimConfig cfg = simgen::default_config();
    cfg.n = 2000;
    cfg.seed = 77;
    const auto gen = simgen::generate(cfg);
    const auto r = eval::quantile_residuals(gen.data, cfg.truth);
    REQUIRE(r.size() == 2000);

    double mean = 0.0;
    for (double v : r) mean += v;
    mean /= r.size();
    double var = 0.0;
    for (double v : r) var += (v - mean) * (v - mean);
    var /= (r.size() - 1);
    CHECK(mean == doctest::Approx(0.0).scale(1.0).epsilon(0.08));
    CHECK(std::sqrt(var) == doctest::Approx(1.0).epsilon(0.08));

    // Kolmogorov-Smirnov distance against N(0,1); 1.63/sqrt(n) is the 1%
    // critical value, well above sampling noise here.
    std::vector<double> sorted = r;
    std::sort(sorted.begin(), sorted.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double F = 0.5 * std::erfc(-sorted[i] / std::sqrt(2.0));
        const double lo = static_cast<double>(i) / sorted.size();
        const double hi = static_cast<double>(i + 1) / sorted.size();
        ks = std::max({ks, std::fabs(F - lo), std::fabs(F - hi)});
    }
    CHECK(ks < 1.63 / std::sqrt(static_cast<double>(sorted.size())));
}

TEST_CASE("quantile residual values invert the fitted cdf") {
    const auto truth = simgen::reference_truth();
    Dataset d;
    d.responses = {2.0, 4.5};
    d.design = Matrix(2, 10, 0.05);
    const auto r = eval::quantile_residuals(d, truth);
    for (std::size_t i = 0; i < 2; ++i) {
        const double u =
            model::mixture_cdf(d.responses[i], d.design.row(i), truth);
        CHECK(r[i] == doctest::Approx(mathfn::normal_quantile(u)).epsilon(1e-12));
    }
}

TEST_CASE("report bundles the metrics consistently") {
    simgen::SimConfig cfg = simgen::default_config();
    cfg.n = 120;
    cfg.seed = 13;
    const auto gen = simgen::generate(cfg);
    const auto rep = eval::report(gen.data, cfg.truth);

    double ll = 0.0;
    for (std::size_t i = 0; i < gen.data.n(); ++i)
        ll += model::mixture_log_density(gen.data.responses[i], gen.data.design.row(i),
                                         cfg.truth);
    CHECK(rep.nll == doctest::Approx(-ll).epsilon(1e-12));

    const auto yhat = eval::point_predictions(gen.data, cfg.truth);
    double mse = 0.0;
    for (std::size_t i = 0; i < gen.data.n(); ++i) {
        const double d = gen.data.responses[i] - yhat[i];
        mse += d * d;
    }
    CHECK(rep.mse == doctest::Approx(mse / gen.data.n()).epsilon(1e-12));
    CHECK(rep.pseudo_r2 == doctest::Approx(eval::pseudo_r2(gen.data.responses, yhat))
                               .epsilon(1e-14));
    CHECK(rep.lift == doctest::Approx(eval::lift(gen.data.responses, yhat)).epsilon(1e-14));
    CHECK(rep.mcrps > 0.0);
}
