#include "fmrcc/simgen.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fmrcc/model.hpp"

namespace fmrcc::simgen {

void SimConfig::validate() const {
    if (n < 1 || p < 1) throw std::invalid_argument("SimConfig: n and p must be positive");
    if (std::accumulate(block_sizes.begin(), block_sizes.end(), std::size_t{0}) != p)
        throw std::invalid_argument("SimConfig: block sizes must sum to p");
    if (!(varrho >= 0.0 && varrho < 1.0))
        throw std::invalid_argument("SimConfig: varrho must lie in [0, 1)");
    if (!(var > 0.0)) throw std::invalid_argument("SimConfig: var must be positive");
    truth.validate();
    if (truth.num_covariates() != p)
        throw std::invalid_argument("SimConfig: truth dimension != p");
}

namespace {

// Lower Cholesky factor; throws if the matrix is not positive definite.
Matrix cholesky(const Matrix& a) {
    const std::size_t n = a.rows();
    Matrix l(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            if (i == j) {
                if (!(s > 0.0))
                    throw std::runtime_error("cholesky: covariance not positive definite");
                l(i, j) = std::sqrt(s);
            } else {
                l(i, j) = s / l(j, j);
            }
        }
    }
    return l;
}

Matrix block_covariance(const SimConfig& cfg) {
    Matrix sigma(cfg.p, cfg.p, 0.0);
    std::size_t start = 0;
    for (std::size_t bs : cfg.block_sizes) {
        for (std::size_t j = start; j < start + bs; ++j)
            for (std::size_t k = start; k < start + bs; ++k)
                sigma(j, k) = (j == k) ? cfg.var : cfg.var * cfg.varrho;
        start += bs;
    }
    return sigma;
}

}  // namespace

double gamma_rng(double mu, double phi, std::mt19937_64& rng) {
    const GammaParams gp{mu, phi};
    gp.validate();
    std::gamma_distribution<double> dist(gp.shape(), gp.scale());
    return dist(rng);
}

ParameterSet reference_truth() {
    ParameterSet t;
    t.weights = {0.7, 0.3};
    t.intercepts = {1.0, 2.0};
    t.dispersions = {0.2, 0.1};
    t.coefficients = Matrix(10, 2);
    for (std::size_t j = 0; j < 10; ++j) {
        t.coefficients(j, 0) = j < 5 ? -0.1 : -0.2;
        t.coefficients(j, 1) = j < 5 ? 0.1 : 0.2;
    }
    t.validate();
    return t;
}

SimConfig default_config() {
    SimConfig cfg;
    cfg.truth = reference_truth();
    return cfg;
}

Generated generate(const SimConfig& cfg) {
    cfg.validate();
    const std::size_t n = cfg.n;
    const std::size_t p = cfg.p;
    const Matrix chol = cholesky(block_covariance(cfg));

    std::mt19937_64 rng(static_cast<std::uint64_t>(cfg.seed));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    Generated out;
    out.data.design = Matrix(n, p);
    out.data.responses.resize(n);
    out.data.names.resize(p);
    for (std::size_t j = 0; j < p; ++j) out.data.names[j] = "x" + std::to_string(j + 1);
    out.labels.resize(n);

    const std::size_t H = cfg.truth.num_components();
    std::vector<double> cumw(H);
    double acc = 0.0;
    for (std::size_t h = 0; h < H; ++h) {
        acc += cfg.truth.weights[h];
        cumw[h] = acc;
    }

    std::vector<double> zvec(p);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p; ++j) zvec[j] = gauss(rng);
        for (std::size_t j = 0; j < p; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k <= j; ++k) s += chol(j, k) * zvec[k];
            out.data.design(i, j) = s;
        }
        const double u = unif(rng);
        std::size_t h = 0;
        while (h + 1 < H && u >= cumw[h]) ++h;
        out.labels[i] = h;
        const std::vector<double> beta = cfg.truth.beta(h);
        const double mu = model::mean_from_linear_predictor(cfg.truth.intercepts[h], beta,
                                                            out.data.design.row(i));
        out.data.responses[i] = gamma_rng(mu, cfg.truth.dispersions[h], rng);
    }

    std::size_t start = 0;
    for (std::size_t bs : cfg.block_sizes) {
        clusters::Block blk(bs);
        std::iota(blk.begin(), blk.end(), start);
        out.truth_partition.push_back(std::move(blk));
        start += bs;
    }
    out.data.validate();
    return out;
}

}  // namespace fmrcc::simgen
