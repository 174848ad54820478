#pragma once

#include <cstdint>
#include <vector>

#include "fmrcc/types.hpp"

// Starting values: K-means on the response seeds the weights and splits
// the sample; a ridge Gamma GLM per subgroup gives (beta0, beta, phi).

namespace fmrcc::init {

struct InitConfig {
    int kmeans_restarts = 5;
    int kmeans_max_iter = 100;
    double ridge_gamma = 0.001;
    std::int64_t seed = 0;

    void validate() const {
        if (kmeans_restarts < 1 || kmeans_max_iter < 1 || ridge_gamma < 0.0)
            throw std::invalid_argument("InitConfig: invalid settings");
    }
};

struct KmeansResult {
    std::vector<std::size_t> labels;  // n, in [0, H); ordered by ascending cluster mean
    std::vector<double> weights;      // H, cluster proportions
    double wcss = 0.0;
};

// Lloyd's algorithm on the 1-D response, k-means++ seeded, best of
// `kmeans_restarts` by within-cluster sum of squares.
KmeansResult kmeans_1d(const std::vector<double>& y, std::size_t H,
                       const InitConfig& cfg);

ParameterSet initial_params(const Dataset& data, const std::vector<std::size_t>& labels,
                            std::size_t H, const InitConfig& cfg);

// kmeans_1d followed by initial_params.
ParameterSet initialize(const Dataset& data, std::size_t H, const InitConfig& cfg);

}  // namespace fmrcc::init
