#include "fmrcc/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fmrcc::io {

using nlohmann::json;

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_double(const std::string& s, const std::string& path, std::size_t lineno) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": cannot parse number '" + s + "'");
    }
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    return in;
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r ? rows[0].size() : 0;
    Matrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = rows[i][j].get<double>();
    return m;
}

}  // namespace

Dataset read_dataset_csv(const std::string& path) {
    std::ifstream in = open_input(path);
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error(path + ":1: empty dataset file");
    std::vector<std::string> header = split_csv(line);
    if (header.empty() || header[0] != "y")
        throw std::runtime_error(path + ":1: first column must be 'y'");

    Dataset data;
    data.names.assign(header.begin() + 1, header.end());
    const std::size_t p = data.names.size();
    std::vector<double> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_csv(line);
        if (fields.size() != p + 1)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected " + std::to_string(p + 1) + " fields, got " +
                                     std::to_string(fields.size()));
        for (std::size_t j = 0; j < fields.size(); ++j)
            rows.push_back(parse_double(fields[j], path, lineno));
    }
    const std::size_t n = rows.size() / (p + 1);
    data.responses.resize(n);
    data.design = Matrix(n, p);
    for (std::size_t i = 0; i < n; ++i) {
        data.responses[i] = rows[i * (p + 1)];
        for (std::size_t j = 0; j < p; ++j) data.design(i, j) = rows[i * (p + 1) + 1 + j];
    }
    data.validate();
    return data;
}

void write_dataset_csv(const std::string& path, const Dataset& data) {
    std::ostringstream os;
    os << "y";
    for (const auto& name : data.names) os << ',' << name;
    os << '\n';
    for (std::size_t i = 0; i < data.n(); ++i) {
        os << format_double(data.responses[i]);
        for (std::size_t j = 0; j < data.p(); ++j)
            os << ',' << format_double(data.design(i, j));
        os << '\n';
    }
    write_text(path, os.str());
}

SimilarityMatrix read_similarity_csv(const std::string& path) {
    std::ifstream in = open_input(path);
    std::string line;
    std::vector<std::vector<double>> rows;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<double> row;
        for (const std::string& f : split_csv(line))
            row.push_back(parse_double(f, path, lineno));
        rows.push_back(std::move(row));
    }
    const std::size_t p = rows.size();
    SimilarityMatrix S{Matrix(p, p)};
    for (std::size_t j = 0; j < p; ++j) {
        if (rows[j].size() != p)
            throw std::runtime_error(path + ": similarity matrix is not square");
        for (std::size_t k = 0; k < p; ++k) S.entries(j, k) = rows[j][k];
    }
    S.validate();
    return S;
}

void write_model(const std::string& path, const ModelFile& model) {
    json j;
    j["format"] = "fmrcc-model";
    j["version"] = 1;
    j["names"] = model.names;
    j["params"] = {{"weights", model.params.weights},
                   {"intercepts", model.params.intercepts},
                   {"coefficients", matrix_to_json(model.params.coefficients)},
                   {"dispersions", model.params.dispersions}};
    json z = json::array(), r = json::array();
    for (const Matrix& m : model.state.z) z.push_back(matrix_to_json(m));
    for (const Matrix& m : model.state.r) r.push_back(matrix_to_json(m));
    j["admm"] = {{"z", std::move(z)}, {"r", std::move(r)}};
    j["config"] = {{"gamma", model.config.gamma},   {"v", model.config.v},
                   {"rho", model.config.rho},       {"max_em", model.config.max_em},
                   {"max_admm", model.config.max_admm}, {"eps_pri", model.config.eps_pri},
                   {"eps_dual", model.config.eps_dual}, {"eps_em", model.config.eps_em},
                   {"seed", model.config.seed}};
    if (model.standardize) {
        j["standardize"] = {{"means", model.standardize->means},
                            {"scales", model.standardize->scales}};
    } else {
        j["standardize"] = nullptr;
    }
    write_text(path, j.dump(2) + "\n");
}

ModelFile read_model(const std::string& path) {
    const json j = json::parse(read_text(path));
    if (j.value("format", "") != "fmrcc-model")
        throw std::runtime_error(path + ": not a model file");
    ModelFile m;
    m.names = j["names"].get<std::vector<std::string>>();
    m.params.weights = j["params"]["weights"].get<std::vector<double>>();
    m.params.intercepts = j["params"]["intercepts"].get<std::vector<double>>();
    m.params.coefficients = matrix_from_json(j["params"]["coefficients"]);
    m.params.dispersions = j["params"]["dispersions"].get<std::vector<double>>();
    for (const json& zm : j["admm"]["z"]) m.state.z.push_back(matrix_from_json(zm));
    for (const json& rm : j["admm"]["r"]) m.state.r.push_back(matrix_from_json(rm));
    const json& c = j["config"];
    m.config.gamma = c["gamma"];
    m.config.v = c["v"];
    m.config.rho = c["rho"];
    m.config.max_em = c["max_em"];
    m.config.max_admm = c["max_admm"];
    m.config.eps_pri = c["eps_pri"];
    m.config.eps_dual = c["eps_dual"];
    m.config.eps_em = c["eps_em"];
    m.config.seed = c["seed"];
    if (!j["standardize"].is_null()) {
        Standardization s;
        s.means = j["standardize"]["means"].get<std::vector<double>>();
        s.scales = j["standardize"]["scales"].get<std::vector<double>>();
        m.standardize = std::move(s);
    }
    m.params.validate();
    return m;
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text(const std::string& path) {
    std::ifstream in = open_input(path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace fmrcc::io
