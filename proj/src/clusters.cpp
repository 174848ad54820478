#include "fmrcc/clusters.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "fmrcc/kernels.hpp"

namespace fmrcc::clusters {

namespace {

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

Partition components_of(std::size_t p, const std::vector<ClusterGraph::Edge>& edges) {
    UnionFind uf(p);
    for (const auto& e : edges) uf.unite(e.j, e.k);
    std::vector<std::vector<std::size_t>> by_root(p);
    for (std::size_t j = 0; j < p; ++j) by_root[uf.find(j)].push_back(j);
    Partition part;
    for (auto& blk : by_root)
        if (!blk.empty()) part.push_back(std::move(blk));
    std::sort(part.begin(), part.end(),
              [](const Block& a, const Block& b) { return a.front() < b.front(); });
    return part;
}

// Max-weight assignment of rows to distinct columns, exhaustive search.
double assign_exhaustive(const std::vector<std::vector<double>>& w,
                         std::size_t row, std::vector<bool>& used) {
    if (row == w.size()) return 0.0;
    // A row may stay unmatched; with more true blocks than estimated blocks
    // spending a column on an early row can be suboptimal.
    double best = assign_exhaustive(w, row + 1, used);
    for (std::size_t c = 0; c < w[row].size(); ++c) {
        if (used[c]) continue;
        used[c] = true;
        best = std::max(best, w[row][c] + assign_exhaustive(w, row + 1, used));
        used[c] = false;
    }
    return best;
}

// Hungarian algorithm (minimization, square matrix), O(n^3).
double assign_hungarian(const std::vector<std::vector<double>>& weight) {
    const std::size_t rows = weight.size();
    const std::size_t cols = weight.front().size();
    const std::size_t n = std::max(rows, cols);
    double wmax = 0.0;
    for (const auto& row : weight)
        for (double x : row) wmax = std::max(wmax, x);
    // cost = wmax - weight, padded square.
    std::vector<std::vector<double>> cost(n + 1, std::vector<double>(n + 1, wmax));
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) cost[i + 1][j + 1] = wmax - weight[i][j];

    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        match[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, std::numeric_limits<double>::infinity());
        std::vector<bool> used(n + 1, false);
        do {
            used[j0] = true;
            const std::size_t i0 = match[j0];
            double delta = std::numeric_limits<double>::infinity();
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0][j] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    double total = 0.0;
    for (std::size_t j = 1; j <= n; ++j) {
        const std::size_t i = match[j];
        if (i >= 1 && i <= rows && j <= cols) total += weight[i - 1][j - 1];
    }
    return total;
}

}  // namespace

ClusterGraph extract_clusters(const solver::AdmmState& state) {
    ClusterGraph graph;
    const std::size_t H = state.z.size();
    graph.edges.resize(H);
    graph.partitions.resize(H);
    for (std::size_t h = 0; h < H; ++h) {
        const Matrix& z = state.z[h];
        const std::size_t p = z.rows();
        for (std::size_t j = 0; j < p; ++j)
            for (std::size_t k = j + 1; k < p; ++k)
                if (z(j, k) == z(k, j)) graph.edges[h].push_back({j, k});
        graph.partitions[h] = components_of(p, graph.edges[h]);
    }
    return graph;
}

ClusterGraph extract_clusters(const solver::FitResult& result) {
    return extract_clusters(result.state);
}

double ccp(const Partition& estimated, const Partition& truth) {
    std::size_t p_est = 0, p_true = 0;
    for (const auto& b : estimated) p_est += b.size();
    for (const auto& b : truth) p_true += b.size();
    if (p_est != p_true || p_est == 0)
        throw std::invalid_argument("ccp: partitions must cover the same covariates");

    std::vector<std::vector<double>> overlap(truth.size(),
                                             std::vector<double>(estimated.size(), 0.0));
    for (std::size_t a = 0; a < truth.size(); ++a) {
        std::vector<bool> in_a(p_est, false);
        for (std::size_t idx : truth[a]) in_a[idx] = true;
        for (std::size_t b = 0; b < estimated.size(); ++b)
            for (std::size_t idx : estimated[b])
                if (in_a[idx]) overlap[a][b] += 1.0;
    }

    double matched;
    if (truth.size() <= 8) {
        std::vector<bool> used(estimated.size(), false);
        matched = assign_exhaustive(overlap, 0, used);
    } else {
        matched = assign_hungarian(overlap);
    }
    return matched / static_cast<double>(p_est);
}

SimilarityMatrix cosine_similarity_matrix(const Matrix& design) {
    const std::size_t n = design.rows();
    const std::size_t p = design.cols();
    std::vector<std::vector<double>> cols(p);
    std::vector<double> norms(p);
    for (std::size_t j = 0; j < p; ++j) {
        cols[j] = design.col(j);
        norms[j] = std::sqrt(kernels::dot(cols[j].data(), cols[j].data(), n));
        if (norms[j] == 0.0)
            throw std::invalid_argument("cosine_similarity_matrix: zero column " +
                                        std::to_string(j));
    }
    SimilarityMatrix S{Matrix(p, p, 0.0)};
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t k = j + 1; k < p; ++k) {
            const double c =
                kernels::dot(cols[j].data(), cols[k].data(), n) / (norms[j] * norms[k]);
            const double s = std::max(c, 0.0);
            S.entries(j, k) = s;
            S.entries(k, j) = s;
        }
    return S;
}

SimilarityMatrix constant_similarity_matrix(std::size_t p, double value) {
    if (p < 1 || value < 0.0)
        throw std::invalid_argument("constant_similarity_matrix: invalid arguments");
    SimilarityMatrix S{Matrix(p, p, value)};
    for (std::size_t j = 0; j < p; ++j) S.entries(j, j) = 0.0;
    return S;
}

std::string export_graph(const ClusterGraph& graph) {
    std::ostringstream os;
    os << "component,j,k\n";
    for (std::size_t h = 0; h < graph.edges.size(); ++h)
        for (const auto& e : graph.edges[h])
            os << (h + 1) << ',' << (e.j + 1) << ',' << (e.k + 1) << '\n';
    os << "component,block,covariate\n";
    for (std::size_t h = 0; h < graph.partitions.size(); ++h)
        for (std::size_t b = 0; b < graph.partitions[h].size(); ++b)
            for (std::size_t idx : graph.partitions[h][b])
                os << (h + 1) << ',' << (b + 1) << ',' << (idx + 1) << '\n';
    return os.str();
}

}  // namespace fmrcc::clusters
