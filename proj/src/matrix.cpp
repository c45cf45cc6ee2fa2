#include "graphrob/matrix.hpp"

#include <algorithm>
#include <cmath>

namespace graphrob {

bool DenseMatrix::all_finite() const {
    for (double v : data) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

double DenseMatrix::frobenius_norm() const {
    double s = 0.0;
    for (double v : data) s += v * v;
    return std::sqrt(s);
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols != b.rows) throw UsageError("matmul: shape mismatch");
    DenseMatrix out(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* arow = a.data.data() + i * a.cols;
        double* orow = out.data.data() + i * out.cols;
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double aik = arow[k];
            if (aik == 0.0) continue;
            const double* brow = b.data.data() + k * b.cols;
            for (std::size_t j = 0; j < b.cols; ++j) orow[j] += aik * brow[j];
        }
    }
    return out;
}

DenseMatrix transpose(const DenseMatrix& a) {
    DenseMatrix out(a.cols, a.rows);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < a.cols; ++j) out(j, i) = a(i, j);
    return out;
}

DenseMatrix transpose_matmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows != b.rows) throw UsageError("transpose_matmul: shape mismatch");
    DenseMatrix out(a.cols, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* arow = a.data.data() + i * a.cols;
        const double* brow = b.data.data() + i * b.cols;
        for (std::size_t j = 0; j < a.cols; ++j) {
            const double aij = arow[j];
            if (aij == 0.0) continue;
            double* orow = out.data.data() + j * out.cols;
            for (std::size_t c = 0; c < b.cols; ++c) orow[c] += aij * brow[c];
        }
    }
    return out;
}

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                         std::vector<Triplet> triplets) {
    for (const Triplet& t : triplets) {
        if (t.row >= rows || t.col >= cols)
            throw DataError("sparse matrix: triplet index out of range");
    }
    std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    for (std::size_t i = 1; i < triplets.size(); ++i) {
        if (triplets[i].row == triplets[i - 1].row && triplets[i].col == triplets[i - 1].col)
            throw DataError("sparse matrix: duplicate (row,col) triplet");
    }
    SparseMatrix m;
    m.rows = rows;
    m.cols = cols;
    m.row_ptr.assign(rows + 1, 0);
    m.col_idx.reserve(triplets.size());
    m.values.reserve(triplets.size());
    for (const Triplet& t : triplets) ++m.row_ptr[t.row + 1];
    for (std::size_t i = 0; i < rows; ++i) m.row_ptr[i + 1] += m.row_ptr[i];
    for (const Triplet& t : triplets) {
        m.col_idx.push_back(t.col);
        m.values.push_back(t.value);
    }
    return m;
}

double SparseMatrix::at(NodeId i, NodeId j) const {
    const auto begin = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[i]);
    const auto end = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[i + 1]);
    auto it = std::lower_bound(begin, end, j);
    if (it == end || *it != j) return 0.0;
    return values[static_cast<std::size_t>(it - col_idx.begin())];
}

std::vector<double> SparseMatrix::apply(std::span<const double> x) const {
    std::vector<double> y(rows, 0.0);
    for (std::size_t i = 0; i < rows; ++i) {
        double acc = 0.0;
        for (std::size_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p)
            acc += values[p] * x[col_idx[p]];
        y[i] = acc;
    }
    return y;
}

DenseMatrix SparseMatrix::apply(const DenseMatrix& b) const {
    if (cols != b.rows) throw UsageError("sparse apply: shape mismatch");
    DenseMatrix out(rows, b.cols);
    for (std::size_t i = 0; i < rows; ++i) {
        double* orow = out.data.data() + i * out.cols;
        for (std::size_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) {
            const double v = values[p];
            const double* brow = b.data.data() + col_idx[p] * b.cols;
            for (std::size_t j = 0; j < b.cols; ++j) orow[j] += v * brow[j];
        }
    }
    return out;
}

DenseMatrix SparseMatrix::to_dense() const {
    DenseMatrix out(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p)
            out(i, col_idx[p]) = values[p];
    return out;
}

std::size_t BinaryMatrix::ones_count() const {
    std::size_t c = 0;
    for (const auto& r : row_support) c += r.size();
    return c;
}

BinaryMatrix BinaryMatrix::with_identity_block(const BinaryMatrix& m) {
    BinaryMatrix out(m.rows, m.cols + m.rows);
    for (std::size_t i = 0; i < m.rows; ++i) {
        out.row_support[i] = m.row_support[i];
        out.row_support[i].push_back(static_cast<NodeId>(m.cols + i));
    }
    return out;
}

}  // namespace graphrob
