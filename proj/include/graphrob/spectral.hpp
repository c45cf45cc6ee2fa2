#ifndef GRAPHROB_SPECTRAL_HPP
#define GRAPHROB_SPECTRAL_HPP

#include <vector>

#include "graphrob/graph.hpp"
#include "graphrob/matrix.hpp"

namespace graphrob {

/// Symmetric normalization D^{-1/2} A D^{-1/2}. With add_self_loops the
/// operator is built from A+I and the augmented degrees. Without self-loops
/// every node must have degree >= 1.
SparseMatrix normalized_adjacency(const Graph& g, bool add_self_loops);

/// Normalized Laplacian I - D^{-1/2} A D^{-1/2} (no self-loop augmentation).
/// Every node must have degree >= 1.
SparseMatrix normalized_laplacian(const Graph& g);

/// Eigenvector of the normalized Laplacian for the second-smallest eigenvalue,
/// unit norm, first entry of magnitude > 1e-12 made positive. Power iteration
/// on 2I - L with deflation against the known null direction D^{1/2} 1.
/// Requires a connected graph with n >= 2.
std::vector<double> fiedler_vector(const Graph& g, double tol = 1e-8,
                                   std::size_t max_iter = 10000);

}  // namespace graphrob

#endif
