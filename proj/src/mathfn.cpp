#include "fmrcc/mathfn.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fmrcc::mathfn {

double digamma(double x) {
    if (!(x > 0.0)) throw std::domain_error("digamma: x must be positive");
    double result = 0.0;
    // Shift up until the asymptotic series is accurate.
    while (x < 10.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    // Asymptotic expansion: ln x - 1/(2x) - sum B_{2k}/(2k x^{2k}).
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    double series = inv2 * (1.0 / 12.0
                  - inv2 * (1.0 / 120.0
                  - inv2 * (1.0 / 252.0
                  - inv2 * (1.0 / 240.0
                  - inv2 * (1.0 / 132.0)))));
    result += std::log(x) - 0.5 * inv - series;
    return result;
}

namespace {

// Series representation, valid for x < a + 1.
double gamma_p_series(double a, double x) {
    double sum = 1.0 / a;
    double term = sum;
    double ap = a;
    for (int n = 0; n < 1000; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x) via modified Lentz, valid for x >= a + 1.
double gamma_q_contfrac(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 1000; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_p(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw std::domain_error("gamma_p: require a > 0, x >= 0");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_contfrac(a, x);
}

double normal_quantile(double u) {
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("normal_quantile: u must be in (0,1)");
    // Acklam's rational approximation, then one Halley refinement via erfc.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (u < plow) {
        const double q = std::sqrt(-2.0 * std::log(u));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (u <= 1.0 - plow) {
        const double q = u - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - u));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // Halley step: e = Phi(x) - u, Phi via erfc for tail accuracy.
    const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - u;
    const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
    const double w = e / pdf;
    x -= w / (1.0 + 0.5 * x * w);
    return x;
}

namespace {

struct SimpsonState {
    const std::function<double(double)>* f;
    double worst_tol = 0.0;
    bool converged = true;
};

double simpson_rec(SimpsonState& st, double a, double b, double fa, double fm,
                   double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = (*st.f)(lm);
    const double frm = (*st.f)(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0) {
        st.converged = false;
        st.worst_tol = std::max(st.worst_tol, std::fabs(delta));
        return left + right + delta / 15.0;
    }
    if (std::fabs(delta) <= 15.0 * tol) {
        st.worst_tol = std::max(st.worst_tol, std::fabs(delta) / 15.0);
        return left + right + delta / 15.0;
    }
    return simpson_rec(st, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(st, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

QuadratureResult adaptive_simpson(const std::function<double(double)>& f,
                                  double a, double b, double abs_tol,
                                  int max_depth) {
    if (a == b) return {0.0, 0.0, true};
    SimpsonState st;
    st.f = &f;
    const double fa = f(a);
    const double fb = f(b);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double v = simpson_rec(st, a, b, fa, fm, fb, whole, abs_tol, max_depth);
    return {v, st.worst_tol, st.converged};
}

}  // namespace fmrcc::mathfn
