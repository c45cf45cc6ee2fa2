#include "graphrob/spectral.hpp"

#include <cmath>
#include <string>

#include "graphrob/rng.hpp"

namespace graphrob {

namespace {

std::vector<double> inv_sqrt_degrees(const Graph& g, bool add_self_loops) {
    const std::size_t n = g.node_count();
    std::vector<double> s(n);
    for (NodeId u = 0; u < n; ++u) {
        const std::size_t d = g.degree(u) + (add_self_loops ? 1 : 0);
        if (d == 0)
            throw DataError("normalized adjacency: node " + std::to_string(u) +
                            " has degree 0");
        s[u] = 1.0 / std::sqrt(static_cast<double>(d));
    }
    return s;
}

}  // namespace

SparseMatrix normalized_adjacency(const Graph& g, bool add_self_loops) {
    const std::size_t n = g.node_count();
    const auto s = inv_sqrt_degrees(g, add_self_loops);
    std::vector<SparseMatrix::Triplet> t;
    t.reserve(2 * g.edge_count() + (add_self_loops ? n : 0));
    for (NodeId u = 0; u < n; ++u) {
        if (add_self_loops) t.push_back({u, u, s[u] * s[u]});
        for (NodeId v : g.neighbors(u)) t.push_back({u, v, s[u] * s[v]});
    }
    return SparseMatrix::from_triplets(n, n, std::move(t));
}

SparseMatrix normalized_laplacian(const Graph& g) {
    const std::size_t n = g.node_count();
    const auto s = inv_sqrt_degrees(g, false);
    std::vector<SparseMatrix::Triplet> t;
    t.reserve(2 * g.edge_count() + n);
    for (NodeId u = 0; u < n; ++u) {
        t.push_back({u, u, 1.0});
        for (NodeId v : g.neighbors(u)) t.push_back({u, v, -s[u] * s[v]});
    }
    return SparseMatrix::from_triplets(n, n, std::move(t));
}

std::vector<double> fiedler_vector(const Graph& g, double tol,
                                   std::size_t max_iter) {
    const std::size_t n = g.node_count();
    if (n < 2) throw DataError("fiedler_vector: need at least 2 nodes");
    if (connected_component_count(g) != 1)
        throw DataError("fiedler_vector: graph is not connected");

    const SparseMatrix lap = normalized_laplacian(g);

    // Known null direction of L, normalized.
    std::vector<double> null_dir(n);
    double nn = 0.0;
    for (NodeId u = 0; u < n; ++u) {
        null_dir[u] = std::sqrt(static_cast<double>(g.degree(u)));
        nn += null_dir[u] * null_dir[u];
    }
    nn = std::sqrt(nn);
    for (double& v : null_dir) v /= nn;

    auto project_out_null = [&](std::vector<double>& x) {
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += x[i] * null_dir[i];
        for (std::size_t i = 0; i < n; ++i) x[i] -= dot * null_dir[i];
    };
    auto normalize = [&](std::vector<double>& x) {
        double norm = 0.0;
        for (double v : x) norm += v * v;
        norm = std::sqrt(norm);
        if (norm == 0.0)
            throw ConvergenceError("fiedler_vector: iterate collapsed", 1.0);
        for (double& v : x) v /= norm;
    };

    // Deterministic pseudo-random start, orthogonal to the null direction.
    std::vector<double> x(n);
    Rng rng(derive_seed(0x59ec7ULL, {n}));
    for (double& v : x) v = rng.next_unit() - 0.5;
    project_out_null(x);
    normalize(x);

    double residual = 0.0;
    std::vector<double> lx;
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        lx = lap.apply(x);
        // Convergence of the current iterate before stepping.
        if (iter % 8 == 0 || iter + 1 == max_iter) {
            double lambda = 0.0;
            for (std::size_t i = 0; i < n; ++i) lambda += x[i] * lx[i];
            double r2 = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double d = lx[i] - lambda * x[i];
                r2 += d * d;
            }
            residual = std::sqrt(r2);
            if (residual <= tol) {
                // Sign convention: first entry with magnitude > 1e-12 positive.
                for (double v : x) {
                    if (std::abs(v) > 1e-12) {
                        if (v < 0.0)
                            for (double& w : x) w = -w;
                        break;
                    }
                }
                return x;
            }
        }
        // y = (2I - L) x, re-orthogonalized against the null direction.
        for (std::size_t i = 0; i < n; ++i) x[i] = 2.0 * x[i] - lx[i];
        project_out_null(x);
        normalize(x);
    }
    throw ConvergenceError(
        "fiedler_vector: no convergence after " + std::to_string(max_iter) +
            " iterations (residual " + std::to_string(residual) + ")",
        residual);
}

}  // namespace graphrob
