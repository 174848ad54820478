#include "fmrcc/types.hpp"

#include <cmath>

namespace fmrcc {

void ParameterSet::validate() const {
    const std::size_t h = weights.size();
    if (h == 0) throw std::invalid_argument("ParameterSet: no components");
    if (intercepts.size() != h || dispersions.size() != h || coefficients.cols() != h)
        throw std::invalid_argument("ParameterSet: component counts disagree");
    double sum = 0.0;
    for (double w : weights) {
        if (!(w > 0.0)) throw std::invalid_argument("ParameterSet: weights must be positive");
        sum += w;
    }
    if (std::fabs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("ParameterSet: weights must sum to 1");
    for (double phi : dispersions)
        if (!(phi > 0.0)) throw std::invalid_argument("ParameterSet: dispersions must be positive");
}

void Dataset::validate() const {
    if (design.rows() != responses.size())
        throw std::invalid_argument("Dataset: design row count != response length");
    if (!names.empty() && names.size() != design.cols())
        throw std::invalid_argument("Dataset: name count != covariate count");
    for (std::size_t i = 0; i < responses.size(); ++i)
        if (!(responses[i] > 0.0))
            throw std::invalid_argument("Dataset: non-positive response at row " + std::to_string(i));
}

void SimilarityMatrix::validate() const {
    const std::size_t n = entries.rows();
    if (entries.cols() != n) throw std::invalid_argument("SimilarityMatrix: not square");
    for (std::size_t j = 0; j < n; ++j) {
        if (entries(j, j) != 0.0)
            throw std::invalid_argument("SimilarityMatrix: diagonal must be zero");
        for (std::size_t k = 0; k < j; ++k) {
            if (entries(j, k) < 0.0)
                throw std::invalid_argument("SimilarityMatrix: negative entry");
            if (entries(j, k) != entries(k, j))
                throw std::invalid_argument("SimilarityMatrix: not symmetric");
        }
    }
}

}  // namespace fmrcc
