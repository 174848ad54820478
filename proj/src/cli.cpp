#include "fmrcc/cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fmrcc/clusters.hpp"
#include "fmrcc/eval.hpp"
#include "fmrcc/init.hpp"
#include "fmrcc/io.hpp"
#include "fmrcc/model.hpp"
#include "fmrcc/simgen.hpp"
#include "fmrcc/solver.hpp"

namespace fmrcc::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kVersion = "0.1.0";

struct Options {
    std::string config_path;
    std::string out_dir = ".";
    std::string similarity = "cosine";
    std::string dataset_path;
    std::string model_path;
    std::string truth_path;
    std::string v_grid = "0,4,8,12,16,20";
    bool standardize = false;

    std::size_t H = 2;
    solver::FitConfig fit;
    init::InitConfig init_cfg;

    // simulate
    std::size_t n = 1000;
    double varrho = 0.9;
    double var = 0.04;
    std::string blocks = "5,5";
};

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::istringstream is(s);
    std::string tok;
    while (std::getline(is, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

std::vector<std::size_t> parse_size_list(const std::string& s) {
    std::vector<std::size_t> out;
    for (double v : parse_double_list(s)) out.push_back(static_cast<std::size_t>(v));
    return out;
}

void apply_config_file(Options& o) {
    if (o.config_path.empty()) return;
    const json j = json::parse(io::read_text(o.config_path));
    if (j.contains("n")) o.n = j["n"].get<std::size_t>();
    if (j.contains("varrho")) o.varrho = j["varrho"].get<double>();
    if (j.contains("var")) o.var = j["var"].get<double>();
    if (j.contains("blocks")) o.blocks = j["blocks"].get<std::string>();
    if (j.contains("H")) o.H = j["H"].get<std::size_t>();
    if (j.contains("seed")) o.fit.seed = j["seed"].get<std::int64_t>();
    if (j.contains("gamma")) o.fit.gamma = j["gamma"].get<double>();
    if (j.contains("v")) o.fit.v = j["v"].get<double>();
    if (j.contains("rho")) o.fit.rho = j["rho"].get<double>();
    if (j.contains("max_em")) o.fit.max_em = j["max_em"].get<int>();
    if (j.contains("max_admm")) o.fit.max_admm = j["max_admm"].get<int>();
    if (j.contains("eps_pri")) o.fit.eps_pri = j["eps_pri"].get<double>();
    if (j.contains("eps_dual")) o.fit.eps_dual = j["eps_dual"].get<double>();
    if (j.contains("eps_em")) o.fit.eps_em = j["eps_em"].get<double>();
    if (j.contains("similarity")) o.similarity = j["similarity"].get<std::string>();
    if (j.contains("standardize")) o.standardize = j["standardize"].get<bool>();
    if (j.contains("v_grid")) o.v_grid = j["v_grid"].get<std::string>();
}

json config_json(const Options& o, const std::string& command) {
    json c = {{"H", o.H},
              {"seed", o.fit.seed},
              {"gamma", o.fit.gamma},
              {"v", o.fit.v},
              {"rho", o.fit.rho},
              {"max_em", o.fit.max_em},
              {"max_admm", o.fit.max_admm},
              {"eps_pri", o.fit.eps_pri},
              {"eps_dual", o.fit.eps_dual},
              {"eps_em", o.fit.eps_em},
              {"similarity", o.similarity},
              {"standardize", o.standardize}};
    if (command == "simulate") {
        c["n"] = o.n;
        c["varrho"] = o.varrho;
        c["var"] = o.var;
        c["blocks"] = o.blocks;
    }
    if (command == "sweep") c["v_grid"] = o.v_grid;
    return c;
}

void write_manifest(const Options& o, const std::string& command,
                    const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs, double elapsed_s) {
    json m = {{"command", command},
              {"version", kVersion},
              {"seed", o.fit.seed},
              {"config", config_json(o, command)},
              {"inputs", inputs},
              {"outputs", outputs},
              {"elapsed_seconds", elapsed_s}};
    io::write_text((fs::path(o.out_dir) / "manifest.json").string(), m.dump(2) + "\n");
}

json params_to_json(const ParameterSet& p) {
    json coef = json::array();
    for (std::size_t j = 0; j < p.coefficients.rows(); ++j) {
        json row = json::array();
        for (std::size_t h = 0; h < p.coefficients.cols(); ++h)
            row.push_back(p.coefficients(j, h));
        coef.push_back(std::move(row));
    }
    return {{"weights", p.weights},
            {"intercepts", p.intercepts},
            {"coefficients", std::move(coef)},
            {"dispersions", p.dispersions}};
}

clusters::Partition partition_from_json(const json& j) {
    clusters::Partition part;
    for (const json& blk : j) {
        clusters::Block b;
        for (const json& idx : blk) b.push_back(idx.get<std::size_t>() - 1);  // 1-based file
        part.push_back(std::move(b));
    }
    return part;
}

json partition_to_json(const clusters::Partition& part) {
    json out = json::array();
    for (const auto& blk : part) {
        json b = json::array();
        for (std::size_t idx : blk) b.push_back(idx + 1);
        out.push_back(std::move(b));
    }
    return out;
}

SimilarityMatrix resolve_similarity(const std::string& spec, const Matrix& design) {
    if (spec == "cosine") return clusters::cosine_similarity_matrix(design);
    if (spec.rfind("constant:", 0) == 0)
        return clusters::constant_similarity_matrix(design.cols(),
                                                    std::stod(spec.substr(9)));
    if (spec.rfind("file:", 0) == 0) {
        SimilarityMatrix S = io::read_similarity_csv(spec.substr(5));
        if (S.p() != design.cols())
            throw std::runtime_error("similarity matrix dimension " + std::to_string(S.p()) +
                                     " does not match covariate count " +
                                     std::to_string(design.cols()));
        return S;
    }
    throw std::runtime_error("unknown similarity spec: " + spec +
                             " (expected cosine, constant:<v>, or file:<path>)");
}

io::Standardization standardize_in_place(Matrix& design) {
    const std::size_t n = design.rows();
    const std::size_t p = design.cols();
    io::Standardization s;
    s.means.assign(p, 0.0);
    s.scales.assign(p, 1.0);
    for (std::size_t j = 0; j < p; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += design(i, j);
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = design(i, j) - mean;
            var += d * d;
        }
        const double sd = n > 1 ? std::sqrt(var / static_cast<double>(n - 1)) : 0.0;
        s.means[j] = mean;
        s.scales[j] = sd > 1e-12 ? sd : 1.0;
        for (std::size_t i = 0; i < n; ++i)
            design(i, j) = (design(i, j) - s.means[j]) / s.scales[j];
    }
    return s;
}

void apply_standardization(Matrix& design, const io::Standardization& s) {
    for (std::size_t i = 0; i < design.rows(); ++i)
        for (std::size_t j = 0; j < design.cols(); ++j)
            design(i, j) = (design(i, j) - s.means[j]) / s.scales[j];
}

std::string trace_csv(const solver::FitResult& result) {
    std::ostringstream os;
    os << "em_iteration,component,objective,coef_change,pri,dual,admm_iterations\n";
    for (std::size_t m = 0; m < result.trace.size(); ++m) {
        const auto& rec = result.trace[m];
        for (std::size_t h = 0; h < rec.components.size(); ++h) {
            const auto& c = rec.components[h];
            os << (m + 1) << ',' << (h + 1) << ','
               << io::format_double(rec.penalized_objective) << ','
               << io::format_double(rec.coef_change_norm) << ','
               << io::format_double(c.pri) << ',' << io::format_double(c.dual) << ','
               << c.admm_iterations << '\n';
        }
    }
    return os.str();
}

struct FitArtifacts {
    solver::FitResult result;
    io::ModelFile model;
};

FitArtifacts run_fit(const Options& o, Dataset data) {
    io::ModelFile model;
    if (o.standardize) model.standardize = standardize_in_place(data.design);
    const SimilarityMatrix S = resolve_similarity(o.similarity, data.design);

    init::InitConfig icfg = o.init_cfg;
    icfg.seed = o.fit.seed;
    const ParameterSet start = init::initialize(data, o.H, icfg);
    FitArtifacts out{solver::fit(data, S, o.H, o.fit, start), std::move(model)};
    out.model.params = out.result.params;
    out.model.state = out.result.state;
    out.model.config = o.fit;
    out.model.names = data.names;
    return out;
}

int cmd_simulate(const Options& o) {
    const auto t0 = std::chrono::steady_clock::now();
    simgen::SimConfig cfg;
    cfg.n = o.n;
    cfg.varrho = o.varrho;
    cfg.var = o.var;
    cfg.block_sizes = parse_size_list(o.blocks);
    cfg.truth = simgen::reference_truth();
    cfg.p = cfg.truth.num_covariates();
    cfg.seed = o.fit.seed;
    const simgen::Generated gen = simgen::generate(cfg);

    fs::create_directories(o.out_dir);
    const std::string data_path = (fs::path(o.out_dir) / "data.csv").string();
    const std::string truth_path = (fs::path(o.out_dir) / "truth.json").string();
    io::write_dataset_csv(data_path, gen.data);
    json truth = {{"params", params_to_json(cfg.truth)},
                  {"partition", partition_to_json(gen.truth_partition)}};
    io::write_text(truth_path, truth.dump(2) + "\n");

    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(o, "simulate", {}, {data_path, truth_path}, elapsed);
    return 0;
}

int cmd_fit(const Options& o) {
    const auto t0 = std::chrono::steady_clock::now();
    const Dataset data = io::read_dataset_csv(o.dataset_path);
    const FitArtifacts art = run_fit(o, data);

    fs::create_directories(o.out_dir);
    const std::string model_path = (fs::path(o.out_dir) / "model.json").string();
    const std::string trace_path = (fs::path(o.out_dir) / "trace.csv").string();
    io::write_model(model_path, art.model);
    io::write_text(trace_path, trace_csv(art.result));

    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(o, "fit", {o.dataset_path}, {model_path, trace_path}, elapsed);
    return 0;
}

int cmd_sweep(const Options& o) {
    const auto t0 = std::chrono::steady_clock::now();
    const Dataset data = io::read_dataset_csv(o.dataset_path);
    std::vector<double> grid = parse_double_list(o.v_grid);
    if (grid.empty()) throw std::runtime_error("sweep: empty v grid");
    std::sort(grid.begin(), grid.end());

    clusters::Partition truth_partition;
    if (!o.truth_path.empty()) {
        const json truth = json::parse(io::read_text(o.truth_path));
        truth_partition = partition_from_json(truth["partition"]);
    }

    Dataset work = data;
    io::Standardization std_info;
    if (o.standardize) std_info = standardize_in_place(work.design);
    const SimilarityMatrix S = resolve_similarity(o.similarity, work.design);
    init::InitConfig icfg = o.init_cfg;
    icfg.seed = o.fit.seed;
    ParameterSet warm = init::initialize(work, o.H, icfg);

    std::ostringstream path_os, summary_os;
    path_os << "v,component,covariate,coefficient\n";
    summary_os << "v,component,blocks" << (truth_partition.empty() ? "" : ",ccp") << '\n';

    for (double v : grid) {
        solver::FitConfig cfg = o.fit;
        cfg.v = v;
        try {
            const solver::FitResult res = solver::fit(work, S, o.H, cfg, warm);
            warm = res.params;
            const clusters::ClusterGraph graph = clusters::extract_clusters(res);
            for (std::size_t h = 0; h < o.H; ++h) {
                for (std::size_t j = 0; j < work.p(); ++j)
                    path_os << io::format_double(v) << ',' << (h + 1) << ',' << (j + 1)
                            << ',' << io::format_double(res.params.coefficients(j, h))
                            << '\n';
                summary_os << io::format_double(v) << ',' << (h + 1) << ','
                           << graph.partitions[h].size();
                if (!truth_partition.empty())
                    summary_os << ','
                               << io::format_double(
                                      clusters::ccp(graph.partitions[h], truth_partition));
                summary_os << '\n';
            }
        } catch (const std::exception& e) {
            std::cerr << "sweep: fit at v=" << v << " failed: " << e.what() << '\n';
            summary_os << io::format_double(v) << ",failed,";
            if (!truth_partition.empty()) summary_os << ',';
            summary_os << '\n';
        }
    }

    fs::create_directories(o.out_dir);
    const std::string path_path = (fs::path(o.out_dir) / "path.csv").string();
    const std::string summary_path = (fs::path(o.out_dir) / "summary.csv").string();
    io::write_text(path_path, path_os.str());
    io::write_text(summary_path, summary_os.str());

    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(o, "sweep", {o.dataset_path}, {path_path, summary_path}, elapsed);
    return 0;
}

int cmd_evaluate(const Options& o) {
    const auto t0 = std::chrono::steady_clock::now();
    Dataset data = io::read_dataset_csv(o.dataset_path);
    const io::ModelFile model = io::read_model(o.model_path);
    if (model.params.num_covariates() != data.p())
        throw std::runtime_error("evaluate: model has p=" +
                                 std::to_string(model.params.num_covariates()) +
                                 " covariates but dataset has p=" +
                                 std::to_string(data.p()));
    if (model.standardize) apply_standardization(data.design, *model.standardize);

    const eval::MetricReport rep = eval::report(data, model.params);
    const std::vector<double> yhat = eval::point_predictions(data, model.params);
    const std::vector<double> resid = eval::quantile_residuals(data, model.params);

    std::ostringstream per_obs;
    per_obs << "yhat,crps,quantile_residual\n";
    for (std::size_t i = 0; i < data.n(); ++i) {
        per_obs << io::format_double(yhat[i]) << ','
                << io::format_double(
                       eval::crps(data.responses[i], data.design.row(i), model.params))
                << ',' << io::format_double(resid[i]) << '\n';
    }

    fs::create_directories(o.out_dir);
    const std::string metrics_path = (fs::path(o.out_dir) / "metrics.json").string();
    const std::string per_obs_path = (fs::path(o.out_dir) / "per_obs.csv").string();
    const json metrics = {{"nll", rep.nll},
                          {"pseudo_r2", rep.pseudo_r2},
                          {"mse", rep.mse},
                          {"mcrps", rep.mcrps},
                          {"lift", rep.lift}};
    io::write_text(metrics_path, metrics.dump(2) + "\n");
    io::write_text(per_obs_path, per_obs.str());

    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(o, "evaluate", {o.dataset_path, o.model_path},
                   {metrics_path, per_obs_path}, elapsed);
    return 0;
}

int cmd_clusters(const Options& o) {
    const auto t0 = std::chrono::steady_clock::now();
    const io::ModelFile model = io::read_model(o.model_path);
    const clusters::ClusterGraph graph = clusters::extract_clusters(model.state);

    std::ostringstream part_os;
    part_os << "component,block,covariate,name\n";
    for (std::size_t h = 0; h < graph.partitions.size(); ++h)
        for (std::size_t b = 0; b < graph.partitions[h].size(); ++b)
            for (std::size_t idx : graph.partitions[h][b])
                part_os << (h + 1) << ',' << (b + 1) << ',' << (idx + 1) << ','
                        << (idx < model.names.size() ? model.names[idx] : "") << '\n';

    fs::create_directories(o.out_dir);
    const std::string edges_path = (fs::path(o.out_dir) / "edges.csv").string();
    const std::string part_path = (fs::path(o.out_dir) / "partition.csv").string();
    io::write_text(edges_path, clusters::export_graph(graph));
    io::write_text(part_path, part_os.str());

    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(o, "clusters", {o.model_path}, {edges_path, part_path}, elapsed);
    return 0;
}

void add_fit_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--H", o.H, "number of mixture components");
    cmd->add_option("--gamma", o.fit.gamma, "ridge penalty");
    cmd->add_option("--v", o.fit.v, "fusion penalty");
    cmd->add_option("--rho", o.fit.rho, "ADMM penalty parameter");
    cmd->add_option("--max-em", o.fit.max_em, "maximum EM iterations");
    cmd->add_option("--max-admm", o.fit.max_admm, "maximum ADMM iterations per M-step");
    cmd->add_option("--eps-pri", o.fit.eps_pri, "ADMM primal residual threshold");
    cmd->add_option("--eps-dual", o.fit.eps_dual, "ADMM dual residual threshold");
    cmd->add_option("--eps-em", o.fit.eps_em, "EM coefficient-change threshold");
    cmd->add_option("--similarity", o.similarity,
                    "similarity spec: cosine | constant:<v> | file:<path>");
    cmd->add_flag("--standardize", o.standardize,
                  "standardize covariates, storing means/scales in the model");
}

}  // namespace

int run(const std::vector<std::string>& args) {
    Options o;

    // --config provides defaults; explicit flags override them.
    for (std::size_t i = 0; i + 1 < args.size(); ++i)
        if (args[i] == "--config") o.config_path = args[i + 1];
    try {
        apply_config_file(o);
    } catch (const std::exception& e) {
        std::cerr << "error: bad config file: " << e.what() << '\n';
        return 1;
    }

    CLI::App app{"Mixture Gamma regression with covariate clustering"};
    app.require_subcommand(1);
    app.add_option("--config", o.config_path, "JSON config with option defaults");

    CLI::App* sim = app.add_subcommand("simulate", "generate a synthetic dataset");
    sim->add_option("--n", o.n, "sample size");
    sim->add_option("--varrho", o.varrho, "within-block correlation");
    sim->add_option("--var", o.var, "covariate variance");
    sim->add_option("--blocks", o.blocks, "comma-separated block sizes");
    sim->add_option("--seed", o.fit.seed, "RNG seed");
    sim->add_option("--out", o.out_dir, "output directory");

    CLI::App* fitc = app.add_subcommand("fit", "fit the mixture model");
    fitc->add_option("dataset", o.dataset_path, "dataset CSV")->required();
    add_fit_flags(fitc, o);
    fitc->add_option("--seed", o.fit.seed, "RNG seed (initialization)");
    fitc->add_option("--out", o.out_dir, "output directory");

    CLI::App* sweep = app.add_subcommand("sweep", "solution path over a v grid");
    sweep->add_option("dataset", o.dataset_path, "dataset CSV")->required();
    sweep->add_option("--v-grid", o.v_grid, "comma-separated v values");
    sweep->add_option("--truth", o.truth_path, "truth JSON for CCP reporting");
    add_fit_flags(sweep, o);
    sweep->add_option("--seed", o.fit.seed, "RNG seed (initialization)");
    sweep->add_option("--out", o.out_dir, "output directory");

    CLI::App* ev = app.add_subcommand("evaluate", "compute metrics for a fitted model");
    ev->add_option("dataset", o.dataset_path, "dataset CSV")->required();
    ev->add_option("model", o.model_path, "model JSON")->required();
    ev->add_option("--out", o.out_dir, "output directory");

    CLI::App* cl = app.add_subcommand("clusters", "extract covariate clusters");
    cl->add_option("model", o.model_path, "model JSON")->required();
    cl->add_option("--out", o.out_dir, "output directory");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (sim->parsed()) return cmd_simulate(o);
        if (fitc->parsed()) return cmd_fit(o);
        if (sweep->parsed()) return cmd_sweep(o);
        if (ev->parsed()) return cmd_evaluate(o);
        if (cl->parsed()) return cmd_clusters(o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args);
}

}  // namespace fmrcc::cli
