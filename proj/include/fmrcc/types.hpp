#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace fmrcc {

// Dense row-major matrix of doubles. Small and unclever on purpose; the
// hot loops go through the kernels layer on raw pointers.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    double* row(std::size_t i) { return data_.data() + i * cols_; }
    const double* row(std::size_t i) const { return data_.data() + i * cols_; }

    std::vector<double> col(std::size_t j) const {
        std::vector<double> out(rows_);
        for (std::size_t i = 0; i < rows_; ++i) out[i] = data_[i * cols_ + j];
        return out;
    }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Gamma distribution in mean/dispersion form: shape = 1/phi^2,
// scale = mu * phi^2, so shape * scale = mu.
struct GammaParams {
    double mu;
    double phi;

    void validate() const {
        if (!(mu > 0.0) || !(phi > 0.0))
            throw std::domain_error("GammaParams: mu and phi must be positive");
    }
    double shape() const { return 1.0 / (phi * phi); }
    double scale() const { return mu * phi * phi; }
};

// Full parameter set of an H-component mixture Gamma regression.
struct ParameterSet {
    std::vector<double> weights;     // H, positive, sums to 1
    std::vector<double> intercepts;  // H
    Matrix coefficients;             // p x H, column h = beta_h
    std::vector<double> dispersions; // H, positive

    std::size_t num_components() const { return weights.size(); }
    std::size_t num_covariates() const { return coefficients.rows(); }

    std::vector<double> beta(std::size_t h) const { return coefficients.col(h); }

    void validate() const;
};

struct Dataset {
    std::vector<double> responses;  // n, strictly positive
    Matrix design;                  // n x p
    std::vector<std::string> names; // p column labels

    std::size_t n() const { return responses.size(); }
    std::size_t p() const { return design.cols(); }

    void validate() const;
};

// Symmetric nonnegative p x p similarity matrix with zero diagonal.
struct SimilarityMatrix {
    Matrix entries;

    std::size_t p() const { return entries.rows(); }
    double operator()(std::size_t j, std::size_t k) const { return entries(j, k); }

    void validate() const;
};

}  // namespace fmrcc
