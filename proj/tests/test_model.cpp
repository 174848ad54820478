#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "fmrcc/mathfn.hpp"
#include "fmrcc/model.hpp"
#include "fmrcc/simgen.hpp"

using namespace fmrcc;

namespace {

ParameterSet random_params(std::size_t p, std::size_t H, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.1, 1.0);
    std::normal_distribution<double> g(0.0, 0.5);
    ParameterSet ps;
    ps.weights.resize(H);
    double sum = 0.0;
    for (double& w : ps.weights) {
        w = u(rng);
        sum += w;
    }
    for (double& w : ps.weights) w /= sum;
    // Renormalize exactly enough for the 1e-12 invariant.
    double s2 = 0.0;
    for (std::size_t h = 0; h + 1 < H; ++h) s2 += ps.weights[h];
    ps.weights[H - 1] = 1.0 - s2;
    ps.intercepts.resize(H);
    ps.dispersions.resize(H);
    ps.coefficients = Matrix(p, H);
    for (std::size_t h = 0; h < H; ++h) {
        ps.intercepts[h] = g(rng);
        ps.dispersions[h] = u(rng);
        for (std::size_t j = 0; j < p; ++j) ps.coefficients(j, h) = g(rng);
    }
    return ps;
}

Dataset random_dataset(std::size_t n, std::size_t p, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.5, 4.0);
    Dataset d;
    d.responses.resize(n);
    d.design = Matrix(n, p);
    for (std::size_t i = 0; i < n; ++i) {
        d.responses[i] = u(rng);
        for (std::size_t j = 0; j < p; ++j) d.design(i, j) = g(rng);
    }
    return d;
}

}  // namespace

TEST_CASE("gamma log density special and reference cases") {
    // shape = scale = 1 reduces to the unit exponential.
    CHECK(model::gamma_log_density(1.0, {1.0, 1.0}) == doctest::Approx(-1.0).epsilon(1e-14));

    // shape 4, scale 0.375: evaluate the density expression directly.
    const double a = 4.0, s = 0.375, y = 2.0;
    const double direct =
        std::log(std::pow(y, a - 1.0) * std::exp(-y / s) / (std::pow(s, a) * std::tgamma(a)));
    CHECK(model::gamma_log_density(2.0, {1.5, 0.5}) == doctest::Approx(direct).epsilon(1e-13));

    CHECK_THROWS_AS(model::gamma_log_density(-1.0, {1.0, 1.0}), std::domain_error);
    CHECK_THROWS_AS(model::gamma_log_density(1.0, {0.0, 1.0}), std::domain_error);
}

TEST_CASE("gamma density integrates to one on a (mu, phi) grid") {
    for (double mu : {0.5, 1.0, 2.0}) {
        for (double phi : {0.2, 0.5, 1.0}) {
            const GammaParams gp{mu, phi};
            double upper = mu;
            while (model::gamma_cdf(upper, gp) < 1.0 - 1e-13) upper *= 2.0;
            const auto f = [&](double z) {
                return z <= 0.0 ? 0.0 : std::exp(model::gamma_log_density(z, gp));
            };
            const auto q = mathfn::adaptive_simpson(f, 1e-300, upper, 1e-10);
            CHECK(q.value == doctest::Approx(1.0).epsilon(1e-8));
        }
    }
}

TEST_CASE("mean from linear predictor") {
    const std::vector<double> zero3(3, 0.0);
    const std::vector<double> x{1.0, 2.0, 3.0};
    CHECK(model::mean_from_linear_predictor(0.0, zero3, x.data()) == 1.0);
    CHECK(model::mean_from_linear_predictor(1.0, zero3, x.data()) ==
          doctest::Approx(std::exp(1.0)).epsilon(1e-15));

    const std::vector<double> big{400.0, 400.0, 0.0};
    CHECK_THROWS_AS(model::mean_from_linear_predictor(0.0, big, x.data()),
                    std::overflow_error);
}

TEST_CASE("component-1 mean matches the generator truth") {
    const ParameterSet truth = simgen::reference_truth();
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0.0, 0.2);
    std::vector<double> x(10);
    for (double& xi : x) xi = g(rng);
    double eta = 1.0;
    for (std::size_t j = 0; j < 10; ++j) eta += (j < 5 ? -0.1 : -0.2) * x[j];
    CHECK(model::mean_from_linear_predictor(truth.intercepts[0], truth.beta(0), x.data()) ==
          doctest::Approx(std::exp(eta)).epsilon(1e-14));
}

TEST_CASE("mixture log density") {
    std::mt19937_64 rng(17);

    SUBCASE("single component equals the gamma log density") {
        const ParameterSet ps = random_params(4, 1, rng);
        const Dataset d = random_dataset(5, 4, rng);
        for (std::size_t i = 0; i < d.n(); ++i) {
            const double mu = model::mean_from_linear_predictor(
                ps.intercepts[0], ps.beta(0), d.design.row(i));
            CHECK(model::mixture_log_density(d.responses[i], d.design.row(i), ps) ==
                  doctest::Approx(model::gamma_log_density(d.responses[i],
                                                           {mu, ps.dispersions[0]}))
                      .epsilon(1e-13));
        }
    }

    SUBCASE("identical components collapse to one") {
        ParameterSet ps = random_params(3, 1, rng);
        ParameterSet two = ps;
        two.weights = {0.3, 0.7};
        two.intercepts = {ps.intercepts[0], ps.intercepts[0]};
        two.dispersions = {ps.dispersions[0], ps.dispersions[0]};
        two.coefficients = Matrix(3, 2);
        for (std::size_t j = 0; j < 3; ++j)
            two.coefficients(j, 0) = two.coefficients(j, 1) = ps.coefficients(j, 0);
        const Dataset d = random_dataset(4, 3, rng);
        for (std::size_t i = 0; i < d.n(); ++i)
            CHECK(model::mixture_log_density(d.responses[i], d.design.row(i), two) ==
                  doctest::Approx(model::mixture_log_density(d.responses[i],
                                                             d.design.row(i), ps))
                      .epsilon(1e-13));
    }

    SUBCASE("two-component value matches direct summation") {
        const ParameterSet truth = simgen::reference_truth();
        std::vector<double> x(10, 0.1);
        const double y = 3.0;
        long double direct = 0.0L;
        for (std::size_t h = 0; h < 2; ++h) {
            const double mu = model::mean_from_linear_predictor(truth.intercepts[h],
                                                                truth.beta(h), x.data());
            direct += static_cast<long double>(truth.weights[h]) *
                      std::exp(static_cast<long double>(
                          model::gamma_log_density(y, {mu, truth.dispersions[h]})));
        }
        CHECK(model::mixture_log_density(y, x.data(), truth) ==
              doctest::Approx(static_cast<double>(std::log(direct))).epsilon(1e-12));
    }

    SUBCASE("invariant under permutation of component labels") {
        ParameterSet ps = random_params(4, 3, rng);
        ParameterSet perm = ps;
        const std::size_t order[3] = {2, 0, 1};
        for (std::size_t h = 0; h < 3; ++h) {
            perm.weights[h] = ps.weights[order[h]];
            perm.intercepts[h] = ps.intercepts[order[h]];
            perm.dispersions[h] = ps.dispersions[order[h]];
            for (std::size_t j = 0; j < 4; ++j)
                perm.coefficients(j, h) = ps.coefficients(j, order[h]);
        }
        const Dataset d = random_dataset(6, 4, rng);
        for (std::size_t i = 0; i < d.n(); ++i)
            CHECK(model::mixture_log_density(d.responses[i], d.design.row(i), perm) ==
                  doctest::Approx(model::mixture_log_density(d.responses[i],
                                                             d.design.row(i), ps))
                      .epsilon(1e-13));
    }
}

TEST_CASE("penalized objective") {
    std::mt19937_64 rng(23);
    const std::size_t n = 5, p = 3, H = 2;
    const Dataset d = random_dataset(n, p, rng);
    const ParameterSet ps = random_params(p, H, rng);

    SimilarityMatrix S{Matrix(p, p, 0.0)};
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t k = j + 1; k < p; ++k) S.entries(j, k) = S.entries(k, j) = u(rng);

    SUBCASE("penalties vanish at gamma = v = 0") {
        double ll = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            ll += model::mixture_log_density(d.responses[i], d.design.row(i), ps);
        CHECK(model::penalized_objective(d, ps, S, 0.0, 0.0) ==
              doctest::Approx(ll).epsilon(1e-12));
    }

    SUBCASE("equal coefficients within a component kill the fused term") {
        ParameterSet flat = ps;
        for (std::size_t h = 0; h < H; ++h)
            for (std::size_t j = 0; j < p; ++j) flat.coefficients(j, h) = 0.3 * (h + 1.0);
        const double with_v = model::penalized_objective(d, flat, S, 0.5, 7.0);
        const double without_v = model::penalized_objective(d, flat, S, 0.5, 0.0);
        CHECK(with_v == doctest::Approx(without_v).epsilon(1e-14));
    }

    SUBCASE("matches term-by-term assembly") {
        const double gamma = 0.17, v = 2.3;
        long double obj = 0.0L;
        for (std::size_t i = 0; i < n; ++i)
            obj += model::mixture_log_density(d.responses[i], d.design.row(i), ps);
        for (std::size_t h = 0; h < H; ++h) {
            long double ridge = 0.0L, fused = 0.0L;
            for (std::size_t j = 0; j < p; ++j) {
                ridge += ps.coefficients(j, h) * ps.coefficients(j, h);
                for (std::size_t k = 0; k < p; ++k)
                    fused += S(j, k) *
                             std::fabs(ps.coefficients(j, h) - ps.coefficients(k, h));
            }
            obj -= gamma * ps.weights[h] * ridge;
            obj -= 0.5L * v * ps.weights[h] * fused;
        }
        CHECK(model::penalized_objective(d, ps, S, gamma, v) ==
              doctest::Approx(static_cast<double>(obj)).epsilon(1e-12));
    }

    SUBCASE("fused term invariant to shifting a component's coefficients") {
        ParameterSet shifted = ps;
        for (std::size_t j = 0; j < p; ++j) shifted.coefficients(j, 0) += 0.8;
        // Compare only the fused parts by cancelling likelihood and ridge.
        const double f1 = model::penalized_objective(d, ps, S, 0.0, 3.0) -
                          model::penalized_objective(d, ps, S, 0.0, 0.0);
        const double f2 = model::penalized_objective(d, shifted, S, 0.0, 3.0) -
                          model::penalized_objective(d, shifted, S, 0.0, 0.0);
        CHECK(f1 == doctest::Approx(f2).epsilon(1e-12));
    }

    SUBCASE("dimension mismatch is rejected") {
        SimilarityMatrix bad{Matrix(p + 1, p + 1, 0.0)};
        CHECK_THROWS_AS(model::penalized_objective(d, ps, bad, 0.0, 0.0),
                        std::invalid_argument);
    }
}
