#include "fmrcc/init.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "fmrcc/bfgs.hpp"
#include "fmrcc/solver.hpp"

namespace fmrcc::init {

namespace {

constexpr double kPhiMin = 1e-3;
constexpr double kPhiMax = 10.0;

KmeansResult lloyd_once(const std::vector<double>& y, std::size_t H,
                        int max_iter, std::mt19937_64& rng) {
    const std::size_t n = y.size();
    std::vector<double> centers;
    centers.reserve(H);

    // k-means++ seeding.
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    centers.push_back(y[pick(rng)]);
    std::vector<double> d2(n);
    while (centers.size() < H) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (double c : centers) best = std::min(best, (y[i] - c) * (y[i] - c));
            d2[i] = best;
            total += best;
        }
        if (total <= 0.0) {
            // All points coincide with existing centers; spread over distinct values.
            centers.push_back(y[pick(rng)]);
            continue;
        }
        std::uniform_real_distribution<double> u(0.0, total);
        double target = u(rng);
        std::size_t idx = 0;
        for (; idx + 1 < n; ++idx) {
            target -= d2[idx];
            if (target <= 0.0) break;
        }
        centers.push_back(y[idx]);
    }

    std::vector<std::size_t> labels(n, 0);
    for (int it = 0; it < max_iter; ++it) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double bd = std::numeric_limits<double>::infinity();
            for (std::size_t h = 0; h < H; ++h) {
                const double d = (y[i] - centers[h]) * (y[i] - centers[h]);
                if (d < bd) {
                    bd = d;
                    best = h;
                }
            }
            if (labels[i] != best) {
                labels[i] = best;
                changed = true;
            }
        }
        std::vector<double> sums(H, 0.0);
        std::vector<std::size_t> counts(H, 0);
        for (std::size_t i = 0; i < n; ++i) {
            sums[labels[i]] += y[i];
            ++counts[labels[i]];
        }
        for (std::size_t h = 0; h < H; ++h) {
            if (counts[h] == 0) {
                // Reseed an empty cluster at the point farthest from its centroid.
                std::size_t far = 0;
                double fd = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double d = std::fabs(y[i] - centers[labels[i]]);
                    if (d > fd) {
                        fd = d;
                        far = i;
                    }
                }
                centers[h] = y[far];
                changed = true;
            } else {
                centers[h] = sums[h] / static_cast<double>(counts[h]);
            }
        }
        if (!changed && it > 0) break;
    }

    KmeansResult res;
    res.labels = std::move(labels);
    for (std::size_t i = 0; i < n; ++i)
        res.wcss += (y[i] - centers[res.labels[i]]) * (y[i] - centers[res.labels[i]]);

    // Relabel by ascending cluster mean so the ordering is deterministic.
    std::vector<double> sums(H, 0.0);
    std::vector<std::size_t> counts(H, 0);
    for (std::size_t i = 0; i < n; ++i) {
        sums[res.labels[i]] += y[i];
        ++counts[res.labels[i]];
    }
    std::vector<std::size_t> order(H);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double ma = counts[a] ? sums[a] / counts[a] : std::numeric_limits<double>::infinity();
        const double mb = counts[b] ? sums[b] / counts[b] : std::numeric_limits<double>::infinity();
        return ma < mb;
    });
    std::vector<std::size_t> remap(H);
    for (std::size_t rank = 0; rank < H; ++rank) remap[order[rank]] = rank;
    res.weights.assign(H, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        res.labels[i] = remap[res.labels[i]];
        res.weights[res.labels[i]] += 1.0;
    }
    for (double& w : res.weights) w /= static_cast<double>(n);
    return res;
}

double moment_phi(const std::vector<double>& y, const std::vector<double>& mu,
                  std::size_t dof_used) {
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double r = (y[i] - mu[i]) / mu[i];
        s += r * r;
    }
    const double denom = std::max<double>(1.0, static_cast<double>(y.size()) -
                                                   static_cast<double>(dof_used));
    return std::clamp(std::sqrt(s / denom), kPhiMin, kPhiMax);
}

}  // namespace

KmeansResult kmeans_1d(const std::vector<double>& y, std::size_t H,
                       const InitConfig& cfg) {
    cfg.validate();
    if (y.empty() || H < 1) throw std::invalid_argument("kmeans_1d: empty input");
    const std::set<double> distinct(y.begin(), y.end());
    if (distinct.size() < H)
        throw std::invalid_argument("kmeans_1d: H exceeds the number of distinct values");

    std::mt19937_64 rng(static_cast<std::uint64_t>(cfg.seed));
    KmeansResult best;
    best.wcss = std::numeric_limits<double>::infinity();
    for (int restart = 0; restart < cfg.kmeans_restarts; ++restart) {
        KmeansResult r = lloyd_once(y, H, cfg.kmeans_max_iter, rng);
        if (r.wcss < best.wcss) best = std::move(r);
    }
    return best;
}

ParameterSet initial_params(const Dataset& data, const std::vector<std::size_t>& labels,
                            std::size_t H, const InitConfig& cfg) {
    cfg.validate();
    data.validate();
    const std::size_t n = data.n();
    const std::size_t p = data.p();
    if (labels.size() != n) throw std::invalid_argument("initial_params: label length != n");

    ParameterSet out;
    out.weights.assign(H, 0.0);
    out.intercepts.assign(H, 0.0);
    out.dispersions.assign(H, 1.0);
    out.coefficients = Matrix(p, H, 0.0);

    for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] >= H) throw std::invalid_argument("initial_params: label out of range");
        out.weights[labels[i]] += 1.0;
    }
    for (std::size_t h = 0; h < H; ++h) {
        if (out.weights[h] == 0.0)
            throw std::invalid_argument("initial_params: empty subgroup " + std::to_string(h));
        out.weights[h] /= static_cast<double>(n);
    }

    const Matrix zeros(p, p, 0.0);
    for (std::size_t h = 0; h < H; ++h) {
        std::vector<double> indicator(n, 0.0);
        std::vector<double> yg;
        for (std::size_t i = 0; i < n; ++i)
            if (labels[i] == h) {
                indicator[i] = 1.0;
                yg.push_back(data.responses[i]);
            }
        const double mean_y =
            std::accumulate(yg.begin(), yg.end(), 0.0) / static_cast<double>(yg.size());
        const bool constant =
            std::all_of(yg.begin(), yg.end(), [&](double v) { return v == yg.front(); });

        std::vector<double> mu0(yg.size(), mean_y);
        double phi0 = moment_phi(yg, mu0, 1);

        if (yg.size() < 2 || constant) {
            // Intercept-only fallback.
            out.intercepts[h] = std::log(mean_y);
            out.dispersions[h] = phi0;
            continue;
        }

        // Ridge Gamma GLM on the subgroup, jointly over (beta0, beta, log phi).
        auto obj = solver::make_component_objective(data, indicator, zeros, zeros,
                                                    1.0, cfg.ridge_gamma, 0.0);
        std::vector<double> x0(p + 2, 0.0);
        x0[0] = std::log(mean_y);
        x0[p + 1] = std::log(phi0);
        const bfgs::Result res = bfgs::minimize(obj, std::move(x0));

        out.intercepts[h] = res.x[0];
        for (std::size_t j = 0; j < p; ++j) out.coefficients(j, h) = res.x[1 + j];
        out.dispersions[h] = std::clamp(std::exp(res.x[p + 1]), kPhiMin, kPhiMax);
    }

    out.validate();
    return out;
}

ParameterSet initialize(const Dataset& data, std::size_t H, const InitConfig& cfg) {
    const KmeansResult km = kmeans_1d(data.responses, H, cfg);
    return initial_params(data, km.labels, H, cfg);
}

}  // namespace fmrcc::init
