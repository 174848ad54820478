#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "fmrcc/mathfn.hpp"

using namespace fmrcc;

TEST_CASE("digamma reference values") {
    // psi(1) = -gamma, psi(0.5) = -gamma - 2 ln 2, psi(2) = 1 - gamma.
    const double euler = 0.57721566490153286;
    CHECK(mathfn::digamma(1.0) == doctest::Approx(-euler).epsilon(1e-13));
    CHECK(mathfn::digamma(0.5) ==
          doctest::Approx(-euler - 2.0 * std::log(2.0)).epsilon(1e-13));
    CHECK(mathfn::digamma(2.0) == doctest::Approx(1.0 - euler).epsilon(1e-13));
    CHECK(mathfn::digamma(25.0) ==
          doctest::Approx(3.1987425128519744).epsilon(1e-13));
    CHECK_THROWS_AS(mathfn::digamma(0.0), std::domain_error);
}

TEST_CASE("digamma matches finite differences of lgamma") {
    for (double x : {0.3, 0.9, 1.7, 4.2, 12.0, 80.0}) {
        const double h = 1e-6 * std::max(1.0, x);
        const double fd = (std::lgamma(x + h) - std::lgamma(x - h)) / (2.0 * h);
        CHECK(mathfn::digamma(x) == doctest::Approx(fd).epsilon(1e-7));
    }
}

TEST_CASE("gamma_p reference values") {
    // P(1, x) = 1 - exp(-x).
    for (double x : {0.1, 1.0, 3.0, 10.0})
        CHECK(mathfn::gamma_p(1.0, x) ==
              doctest::Approx(1.0 - std::exp(-x)).epsilon(1e-13));
    // P(0.5, x) = erf(sqrt(x)).
    for (double x : {0.2, 1.5, 4.0})
        CHECK(mathfn::gamma_p(0.5, x) ==
              doctest::Approx(std::erf(std::sqrt(x))).epsilon(1e-12));
    CHECK(mathfn::gamma_p(3.0, 0.0) == 0.0);
    CHECK(mathfn::gamma_p(2.0, 1e4) == doctest::Approx(1.0));
}

TEST_CASE("gamma_p is monotone in x") {
    double prev = -1.0;
    for (double x = 0.0; x <= 20.0; x += 0.25) {
        const double cur = mathfn::gamma_p(4.7, x);
        CHECK(cur >= prev);
        prev = cur;
    }
}

TEST_CASE("normal quantile inverts the normal CDF") {
    for (double u : {1e-10, 1e-4, 0.025, 0.31, 0.5, 0.77, 0.975, 1.0 - 1e-6}) {
        const double x = mathfn::normal_quantile(u);
        const double back = 0.5 * std::erfc(-x / std::sqrt(2.0));
        CHECK(back == doctest::Approx(u).epsilon(1e-10));
    }
    CHECK(mathfn::normal_quantile(0.5) == doctest::Approx(0.0));
    CHECK(mathfn::normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-9));
    CHECK_THROWS_AS(mathfn::normal_quantile(0.0), std::domain_error);
}

TEST_CASE("adaptive simpson integrates known functions") {
    const auto sq = [](double x) { return x * x; };
    auto r = mathfn::adaptive_simpson(sq, 0.0, 3.0, 1e-10);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(9.0).epsilon(1e-12));

    const auto bump = [](double x) { return std::exp(-x * x); };
    r = mathfn::adaptive_simpson(bump, -8.0, 8.0, 1e-10);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-10));
}
