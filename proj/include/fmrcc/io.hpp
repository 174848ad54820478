#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fmrcc/solver.hpp"
#include "fmrcc/types.hpp"

// File formats. Dataset CSV: header row, first column `y`, remaining
// columns covariates; UTF-8, LF, plain decimal notation. The model file is
// a single JSON document holding parameters, ADMM state, fit config,
// column names, and any standardization applied at fit time.

namespace fmrcc::io {

std::string format_double(double x);

Dataset read_dataset_csv(const std::string& path);
void write_dataset_csv(const std::string& path, const Dataset& data);

// Square CSV of nonnegative similarities, no header.
SimilarityMatrix read_similarity_csv(const std::string& path);

struct Standardization {
    std::vector<double> means;
    std::vector<double> scales;
};

struct ModelFile {
    ParameterSet params;
    solver::AdmmState state;
    solver::FitConfig config;
    std::vector<std::string> names;
    std::optional<Standardization> standardize;
};

void write_model(const std::string& path, const ModelFile& model);
ModelFile read_model(const std::string& path);

void write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

}  // namespace fmrcc::io
