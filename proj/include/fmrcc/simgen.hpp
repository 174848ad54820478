#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "fmrcc/clusters.hpp"
#include "fmrcc/types.hpp"

// Synthetic data: block-correlated multivariate normal covariates and a
// two-component mixture Gamma response.

namespace fmrcc::simgen {

struct SimConfig {
    std::size_t n = 1000;
    std::size_t p = 10;
    std::vector<std::size_t> block_sizes = {5, 5};
    double varrho = 0.9;       // within-block correlation, in [0, 1)
    double var = 0.04;         // diagonal variance
    ParameterSet truth;
    std::int64_t seed = 1;

    void validate() const;
};

struct Generated {
    Dataset data;
    std::vector<std::size_t> labels;        // component of each draw
    clusters::Partition truth_partition;    // the coefficient blocks
};

Generated generate(const SimConfig& cfg);

// The reference two-component truth: weights (0.7, 0.3), intercepts (1, 2),
// coefficient columns (-0.1 x5, -0.2 x5) and (0.1 x5, 0.2 x5),
// dispersions (0.2, 0.1).
ParameterSet reference_truth();

SimConfig default_config();

// One draw from Gamma(mean mu, dispersion phi).
double gamma_rng(double mu, double phi, std::mt19937_64& rng);

}  // namespace fmrcc::simgen
