#ifndef GRAPHROB_MATRIX_HPP
#define GRAPHROB_MATRIX_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "graphrob/common.hpp"

namespace graphrob {

/// Row-major dense real matrix.
struct DenseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    DenseMatrix() = default;
    DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
    std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }

    bool all_finite() const;
    double frobenius_norm() const;
};

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix transpose(const DenseMatrix& a);

/// A^T * B without materializing the transpose.
DenseMatrix transpose_matmul(const DenseMatrix& a, const DenseMatrix& b);

/// Sparse real matrix in compressed-row form. Built from coordinate triplets;
/// duplicate (row,col) pairs are rejected.
struct SparseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::size_t> row_ptr;  // size rows+1
    std::vector<NodeId> col_idx;
    std::vector<double> values;

    struct Triplet {
        NodeId row;
        NodeId col;
        double value;
    };

    static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                      std::vector<Triplet> triplets);

    std::size_t nnz() const { return values.size(); }
    double at(NodeId i, NodeId j) const;  // zero when absent

    /// Dense product S * x, x of size cols.
    std::vector<double> apply(std::span<const double> x) const;

    /// Dense product S * B, B of shape cols x k.
    DenseMatrix apply(const DenseMatrix& b) const;

    DenseMatrix to_dense() const;
};

/// Binary matrix stored as sorted per-row support (column indices of ones).
struct BinaryMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::vector<NodeId>> row_support;

    BinaryMatrix() = default;
    BinaryMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), row_support(r) {}

    std::size_t ones_count() const;

    /// Identity pattern appended on the right: row i gains a one at old_cols+i.
    static BinaryMatrix with_identity_block(const BinaryMatrix& m);
};

}  // namespace graphrob

#endif
