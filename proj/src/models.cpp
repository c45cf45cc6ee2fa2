#include "graphrob/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "graphrob/rng.hpp"
#include "graphrob/spectral.hpp"

namespace graphrob {

namespace {

void softmax_rows(DenseMatrix& m) {
    for (std::size_t i = 0; i < m.rows; ++i) {
        auto row = m.row(i);
        double mx = -std::numeric_limits<double>::infinity();
        for (double v : row) mx = std::max(mx, v);
        double sum = 0.0;
        for (double& v : row) {
            v = std::exp(v - mx);
            sum += v;
        }
        for (double& v : row) v /= sum;
    }
}

/// X * W with X binary, optionally row-normalized by its support size.
DenseMatrix binary_times(const BinaryMatrix& x, bool row_normalize,
                         const DenseMatrix& w) {
    DenseMatrix out(x.rows, w.cols);
    for (std::size_t i = 0; i < x.rows; ++i) {
        const auto& sup = x.row_support[i];
        if (sup.empty()) continue;
        const double scale = row_normalize ? 1.0 / static_cast<double>(sup.size()) : 1.0;
        double* orow = out.data.data() + i * out.cols;
        for (NodeId j : sup) {
            const double* wrow = w.data.data() + j * w.cols;
            for (std::size_t c = 0; c < w.cols; ++c) orow[c] += scale * wrow[c];
        }
    }
    return out;
}

/// X^T * G with X binary, matching the normalization of binary_times.
DenseMatrix binary_transpose_times(const BinaryMatrix& x, bool row_normalize,
                                   const DenseMatrix& g) {
    DenseMatrix out(x.cols, g.cols);
    for (std::size_t i = 0; i < x.rows; ++i) {
        const auto& sup = x.row_support[i];
        if (sup.empty()) continue;
        const double scale = row_normalize ? 1.0 / static_cast<double>(sup.size()) : 1.0;
        const double* grow = g.data.data() + i * g.cols;
        for (NodeId j : sup) {
            double* orow = out.data.data() + j * out.cols;
            for (std::size_t c = 0; c < g.cols; ++c) orow[c] += scale * grow[c];
        }
    }
    return out;
}

DenseMatrix glorot_uniform(std::size_t rows, std::size_t cols, Rng& rng) {
    DenseMatrix w(rows, cols);
    const double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
    for (double& v : w.data) v = (2.0 * rng.next_unit() - 1.0) * a;
    return w;
}

/// Adam with bias correction; update order is the flat parameter order, so
/// accumulation is deterministic.
class Adam {
public:
    Adam(std::size_t size, double lr)
        : lr_(lr), m_(size, 0.0), v_(size, 0.0) {}

    void step(std::vector<double>& w, const std::vector<double>& g) {
        ++t_;
        const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
        const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
        for (std::size_t i = 0; i < w.size(); ++i) {
            m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g[i];
            v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * g[i] * g[i];
            const double mhat = m_[i] / bc1;
            const double vhat = v_[i] / bc2;
            w[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
        }
    }

private:
    double lr_;
    double beta1_ = 0.9;
    double beta2_ = 0.999;
    double eps_ = 1e-8;
    std::size_t t_ = 0;
    std::vector<double> m_, v_;
};

double cross_entropy(const DenseMatrix& proba, std::span<const int> labels,
                     std::span<const NodeId> nodes) {
    double loss = 0.0;
    for (NodeId u : nodes) {
        const double p = proba(u, static_cast<std::size_t>(labels[u]));
        loss -= std::log(std::max(p, 1e-300));
    }
    return loss / static_cast<double>(nodes.size());
}

}  // namespace

DenseMatrix Propagation::apply(const DenseMatrix& x) const {
    if (const auto* s = std::get_if<SparseMatrix>(&op_)) return s->apply(x);
    return matmul(std::get<DenseMatrix>(op_), x);
}

std::size_t Propagation::size() const {
    if (const auto* s = std::get_if<SparseMatrix>(&op_)) return s->rows;
    return std::get<DenseMatrix>(op_).rows;
}

Propagation build_propagation(const Graph& g, bool add_self_loops) {
    return Propagation(normalized_adjacency(g, add_self_loops));
}

namespace detail {

DenseMatrix binary_to_dense(const BinaryMatrix& x, bool row_normalize) {
    DenseMatrix out(x.rows, x.cols);
    for (std::size_t i = 0; i < x.rows; ++i) {
        const auto& sup = x.row_support[i];
        if (sup.empty()) continue;
        const double v = row_normalize ? 1.0 / static_cast<double>(sup.size()) : 1.0;
        for (NodeId j : sup) out(i, j) = v;
    }
    return out;
}

double gcn_loss_and_gradients(const Propagation& prop, const BinaryMatrix& attrs,
                              bool row_normalize, std::span<const int> labels,
                              std::span<const NodeId> nodes, const DenseMatrix& w1,
                              const DenseMatrix& w2, double weight_decay,
                              DenseMatrix* grad_w1, DenseMatrix* grad_w2,
                              DenseMatrix* out_proba,
                              const std::vector<char>* dropout_mask,
                              double dropout) {
    // Forward: Y = softmax(A~ relu(A~ X W1) W2)
    DenseMatrix p = binary_times(attrs, row_normalize, w1);
    DenseMatrix z1 = prop.apply(p);
    DenseMatrix h = z1;
    for (double& v : h.data) v = std::max(v, 0.0);
    if (dropout_mask != nullptr) {
        const double keep = 1.0 - dropout;
        for (std::size_t i = 0; i < h.data.size(); ++i)
            h.data[i] = (*dropout_mask)[i] ? h.data[i] / keep : 0.0;
    }
    DenseMatrix q = matmul(h, w2);
    DenseMatrix y = prop.apply(q);
    softmax_rows(y);

    double loss = cross_entropy(y, labels, nodes);
    double decay_term = 0.0;
    for (double v : w1.data) decay_term += v * v;
    for (double v : w2.data) decay_term += v * v;
    loss += 0.5 * weight_decay * decay_term;

    if (out_proba != nullptr) *out_proba = y;
    if (grad_w1 == nullptr && grad_w2 == nullptr) return loss;

    // Backward.
    DenseMatrix g2(y.rows, y.cols);
    const double inv = 1.0 / static_cast<double>(nodes.size());
    for (NodeId u : nodes) {
        for (std::size_t c = 0; c < y.cols; ++c) g2(u, c) = y(u, c) * inv;
        g2(u, static_cast<std::size_t>(labels[u])) -= inv;
    }
    DenseMatrix dq = prop.apply(g2);  // propagation is symmetric
    if (grad_w2 != nullptr) {
        *grad_w2 = transpose_matmul(h, dq);
        for (std::size_t i = 0; i < grad_w2->data.size(); ++i)
            grad_w2->data[i] += weight_decay * w2.data[i];
    }
    if (grad_w1 != nullptr) {
        DenseMatrix g1 = matmul(dq, transpose(w2));
        if (dropout_mask != nullptr) {
            const double keep = 1.0 - dropout;
            for (std::size_t i = 0; i < g1.data.size(); ++i)
                g1.data[i] = (*dropout_mask)[i] ? g1.data[i] / keep : 0.0;
        }
        for (std::size_t i = 0; i < g1.data.size(); ++i)
            if (z1.data[i] <= 0.0) g1.data[i] = 0.0;
        DenseMatrix dp = prop.apply(g1);
        *grad_w1 = binary_transpose_times(attrs, row_normalize, dp);
        for (std::size_t i = 0; i < grad_w1->data.size(); ++i)
            grad_w1->data[i] += weight_decay * w1.data[i];
    }
    return loss;
}

double sgc_loss_and_gradient(const DenseMatrix& features,
                             std::span<const int> labels,
                             std::span<const NodeId> nodes, const DenseMatrix& w,
                             double weight_decay, DenseMatrix* grad_w,
                             DenseMatrix* out_proba) {
    DenseMatrix y = matmul(features, w);
    softmax_rows(y);
    double loss = cross_entropy(y, labels, nodes);
    double decay_term = 0.0;
    for (double v : w.data) decay_term += v * v;
    loss += 0.5 * weight_decay * decay_term;
    if (out_proba != nullptr) *out_proba = y;
    if (grad_w == nullptr) return loss;

    DenseMatrix g(y.rows, y.cols);
    const double inv = 1.0 / static_cast<double>(nodes.size());
    for (NodeId u : nodes) {
        for (std::size_t c = 0; c < y.cols; ++c) g(u, c) = y(u, c) * inv;
        g(u, static_cast<std::size_t>(labels[u])) -= inv;
    }
    *grad_w = transpose_matmul(features, g);
    for (std::size_t i = 0; i < grad_w->data.size(); ++i)
        grad_w->data[i] += weight_decay * w.data[i];
    return loss;
}

}  // namespace detail

namespace {

void check_train_inputs(const LabeledDataset& ds, const Split& split) {
    if (split.train.empty()) throw DataError("train: empty training set");
    if (ds.attributes.cols == 0)
        throw DataError("train: dataset has no attributes");
    std::vector<char> seen(static_cast<std::size_t>(ds.num_classes), 0);
    for (NodeId u : split.train) seen[static_cast<std::size_t>(ds.labels[u])] = 1;
    for (std::size_t c = 0; c < seen.size(); ++c)
        if (!seen[c])
            throw DataError("train: class " + std::to_string(c) +
                            " missing from training set");
}

}  // namespace

GcnModel train_gcn(const LabeledDataset& ds, const Split& split,
                   const TrainConfig& cfg, const Propagation* prop_override) {
    check_train_inputs(ds, split);
    const std::size_t d = ds.attributes.cols;
    const auto c_count = static_cast<std::size_t>(ds.num_classes);

    GcnModel model;
    model.config = cfg;
    model.num_classes = ds.num_classes;
    model.prop = prop_override != nullptr
                     ? *prop_override
                     : build_propagation(ds.graph, cfg.add_self_loops);

    Rng init_rng(derive_seed(cfg.seed, {0}));
    model.w1 = glorot_uniform(d, cfg.hidden, init_rng);
    model.w2 = glorot_uniform(cfg.hidden, c_count, init_rng);

    DenseMatrix best_w1 = model.w1, best_w2 = model.w2;
    double best_val = std::numeric_limits<double>::infinity();
    std::size_t best_epoch = 0, since_best = 0;

    Adam opt_w1(model.w1.data.size(), cfg.learning_rate);
    Adam opt_w2(model.w2.data.size(), cfg.learning_rate);
    DenseMatrix gw1, gw2, proba;
    const std::size_t n = ds.node_count();
    std::vector<char> mask;

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const std::vector<char>* mask_ptr = nullptr;
        if (cfg.dropout > 0.0) {
            Rng drop_rng(derive_seed(cfg.seed, {1, epoch}));
            mask.assign(n * cfg.hidden, 0);
            for (auto& b : mask) b = drop_rng.bernoulli(1.0 - cfg.dropout) ? 1 : 0;
            mask_ptr = &mask;
        }
        const double train_loss = detail::gcn_loss_and_gradients(
            model.prop, ds.attributes, cfg.row_normalize, ds.labels, split.train,
            model.w1, model.w2, cfg.weight_decay, &gw1, &gw2, nullptr, mask_ptr,
            cfg.dropout);
        if (!std::isfinite(train_loss))
            throw ConvergenceError("train_gcn: non-finite training loss", train_loss);
        opt_w1.step(model.w1.data, gw1.data);
        opt_w2.step(model.w2.data, gw2.data);

        const std::span<const NodeId> val_nodes =
            split.val.empty() ? std::span<const NodeId>(split.train) : split.val;
        const double val_loss = detail::gcn_loss_and_gradients(
            model.prop, ds.attributes, cfg.row_normalize, ds.labels, val_nodes,
            model.w1, model.w2, 0.0, nullptr, nullptr);
        if (val_loss < best_val) {
            best_val = val_loss;
            best_w1 = model.w1;
            best_w2 = model.w2;
            best_epoch = epoch + 1;
            since_best = 0;
        } else if (++since_best >= cfg.patience) {
            break;
        }
    }
    if (cfg.epochs > 0 && std::isfinite(best_val)) {
        model.w1 = std::move(best_w1);
        model.w2 = std::move(best_w2);
    }
    model.best_epoch = best_epoch;
    model.best_val_loss = best_val;
    detail::gcn_loss_and_gradients(model.prop, ds.attributes, cfg.row_normalize,
                                   ds.labels, split.train, model.w1, model.w2, 0.0,
                                   nullptr, nullptr, &model.proba);
    return model;
}

DenseMatrix GcnModel::predict_proba(const BinaryMatrix& attrs) const {
    DenseMatrix p = binary_times(attrs, config.row_normalize, w1);
    DenseMatrix z1 = prop.apply(p);
    for (double& v : z1.data) v = std::max(v, 0.0);
    DenseMatrix y = prop.apply(matmul(z1, w2));
    softmax_rows(y);
    return y;
}

DenseMatrix sgc_features(const Graph& g, const BinaryMatrix& attrs,
                         std::size_t k, bool add_self_loops,
                         bool row_normalize) {
    DenseMatrix f = detail::binary_to_dense(attrs, row_normalize);
    if (k == 0) return f;
    const SparseMatrix prop = normalized_adjacency(g, add_self_loops);
    for (std::size_t i = 0; i < k; ++i) f = prop.apply(f);
    return f;
}

SgcModel train_sgc(const LabeledDataset& ds, const Split& split,
                   const TrainConfig& cfg, std::size_t k) {
    check_train_inputs(ds, split);
    const std::size_t d = ds.attributes.cols;
    const auto c_count = static_cast<std::size_t>(ds.num_classes);

    SgcModel model;
    model.config = cfg;
    model.power = k;
    model.num_classes = ds.num_classes;
    model.prop = build_propagation(ds.graph, cfg.add_self_loops);
    const DenseMatrix features =
        sgc_features(ds.graph, ds.attributes, k, cfg.add_self_loops, cfg.row_normalize);

    Rng init_rng(derive_seed(cfg.seed, {0}));
    model.w = glorot_uniform(d, c_count, init_rng);

    DenseMatrix best_w = model.w;
    double best_val = std::numeric_limits<double>::infinity();
    std::size_t best_epoch = 0, since_best = 0;
    Adam opt(model.w.data.size(), cfg.learning_rate);
    DenseMatrix gw;

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const double train_loss = detail::sgc_loss_and_gradient(
            features, ds.labels, split.train, model.w, cfg.weight_decay, &gw);
        if (!std::isfinite(train_loss))
            throw ConvergenceError("train_sgc: non-finite training loss", train_loss);
        opt.step(model.w.data, gw.data);

        const std::span<const NodeId> val_nodes =
            split.val.empty() ? std::span<const NodeId>(split.train) : split.val;
        const double val_loss = detail::sgc_loss_and_gradient(
            features, ds.labels, val_nodes, model.w, 0.0, nullptr);
        if (val_loss < best_val) {
            best_val = val_loss;
            best_w = model.w;
            best_epoch = epoch + 1;
            since_best = 0;
        } else if (++since_best >= cfg.patience) {
            break;
        }
    }
    if (cfg.epochs > 0 && std::isfinite(best_val)) model.w = std::move(best_w);
    model.best_epoch = best_epoch;
    model.best_val_loss = best_val;
    detail::sgc_loss_and_gradient(features, ds.labels, split.train, model.w, 0.0,
                                  nullptr, &model.proba);
    return model;
}

DenseMatrix SgcModel::predict_proba(const BinaryMatrix& attrs) const {
    DenseMatrix f = detail::binary_to_dense(attrs, config.row_normalize);
    for (std::size_t i = 0; i < power; ++i) f = prop.apply(f);
    DenseMatrix y = matmul(f, w);
    softmax_rows(y);
    return y;
}

std::vector<NodePrediction> predict_margins(const DenseMatrix& proba,
                                            std::span<const int> labels,
                                            std::span<const NodeId> nodes) {
    std::vector<NodePrediction> out;
    out.reserve(nodes.size());
    for (NodeId u : nodes) {
        const auto row = proba.row(u);
        std::size_t arg = 0;
        for (std::size_t c = 1; c < row.size(); ++c)
            if (row[c] > row[arg]) arg = c;
        const auto truth = static_cast<std::size_t>(labels[u]);
        double best_other = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < row.size(); ++c)
            if (c != truth) best_other = std::max(best_other, row[c]);
        out.push_back({u, static_cast<int>(arg), row[truth] - best_other});
    }
    return out;
}

Metrics evaluate_metrics(const DenseMatrix& proba, std::span<const int> labels,
                         std::span<const NodeId> nodes, int num_classes) {
    if (nodes.empty()) throw UsageError("evaluate_metrics: empty node set");
    const auto preds = predict_margins(proba, labels, nodes);
    const auto c_count = static_cast<std::size_t>(num_classes);
    std::vector<std::size_t> tp(c_count, 0), fp(c_count, 0), fn(c_count, 0);
    std::size_t correct = 0;
    for (const auto& p : preds) {
        const auto truth = static_cast<std::size_t>(labels[p.node]);
        const auto guess = static_cast<std::size_t>(p.predicted);
        if (guess == truth) {
            ++tp[truth];
            ++correct;
        } else {
            ++fp[guess];
            ++fn[truth];
        }
    }
    Metrics m;
    m.accuracy = static_cast<double>(correct) / static_cast<double>(nodes.size());
    m.per_class_f1.resize(c_count, 0.0);
    for (std::size_t c = 0; c < c_count; ++c) {
        const double denom = static_cast<double>(2 * tp[c] + fp[c] + fn[c]);
        m.per_class_f1[c] = denom > 0.0 ? 2.0 * static_cast<double>(tp[c]) / denom : 0.0;
        m.macro_f1 += m.per_class_f1[c];
    }
    m.macro_f1 /= static_cast<double>(c_count);
    return m;
}

LabeledDataset jaccard_filter(const LabeledDataset& ds, double threshold) {
    if (ds.attributes.cols == 0)
        throw DataError("jaccard_filter: dataset has no attributes");
    auto similarity = [&](NodeId u, NodeId v) {
        const auto& a = ds.attributes.row_support[u];
        const auto& b = ds.attributes.row_support[v];
        if (a.empty() && b.empty()) return 0.0;
        std::size_t inter = 0, i = 0, j = 0;
        while (i < a.size() && j < b.size()) {
            if (a[i] == b[j]) {
                ++inter;
                ++i;
                ++j;
            } else if (a[i] < b[j]) {
                ++i;
            } else {
                ++j;
            }
        }
        const std::size_t uni = a.size() + b.size() - inter;
        return static_cast<double>(inter) / static_cast<double>(uni);
    };
    std::vector<std::pair<NodeId, NodeId>> kept;
    for (const auto& [u, v] : ds.graph.edges())
        if (similarity(u, v) > threshold) kept.emplace_back(u, v);
    LabeledDataset out = ds;
    out.graph = Graph::from_edges(ds.node_count(), kept);
    return out;
}

namespace {

/// Rayleigh-Ritz refinement of an orthonormal block against a symmetric
/// matrix: rotates the block onto approximate eigenvectors and returns the
/// approximate eigenvalues.
std::vector<double> rayleigh_ritz(const DenseMatrix& a, DenseMatrix& q);

void qr_orthonormalize(DenseMatrix& q) {
    // Modified Gram-Schmidt over columns.
    for (std::size_t j = 0; j < q.cols; ++j) {
        for (std::size_t k = 0; k < j; ++k) {
            double dot = 0.0;
            for (std::size_t i = 0; i < q.rows; ++i) dot += q(i, k) * q(i, j);
            for (std::size_t i = 0; i < q.rows; ++i) q(i, j) -= dot * q(i, k);
        }
        double norm = 0.0;
        for (std::size_t i = 0; i < q.rows; ++i) norm += q(i, j) * q(i, j);
        norm = std::sqrt(norm);
        if (norm < 1e-14) {
            // Degenerate column: replace with a deterministic fallback basis
            // vector and re-orthogonalize.
            for (std::size_t i = 0; i < q.rows; ++i) q(i, j) = i == j ? 1.0 : 0.0;
            for (std::size_t k = 0; k < j; ++k) {
                double dot = 0.0;
                for (std::size_t i = 0; i < q.rows; ++i) dot += q(i, k) * q(i, j);
                for (std::size_t i = 0; i < q.rows; ++i) q(i, j) -= dot * q(i, k);
            }
            norm = 0.0;
            for (std::size_t i = 0; i < q.rows; ++i) norm += q(i, j) * q(i, j);
            norm = std::sqrt(norm);
        }
        for (std::size_t i = 0; i < q.rows; ++i) q(i, j) /= norm;
    }
}

/// Jacobi eigenvalue iteration for small symmetric matrices.
void jacobi_eigen(DenseMatrix a, std::vector<double>& eigenvalues,
                  DenseMatrix& eigenvectors) {
    const std::size_t n = a.rows;
    eigenvectors = DenseMatrix(n, n);
    for (std::size_t i = 0; i < n; ++i) eigenvectors(i, i) = 1.0;
    for (int sweep = 0; sweep < 128; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-24) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t i = 0; i < n; ++i) {
                    const double aip = a(i, p), aiq = a(i, q);
                    a(i, p) = c * aip - s * aiq;
                    a(i, q) = s * aip + c * aiq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double api = a(p, i), aqi = a(q, i);
                    a(p, i) = c * api - s * aqi;
                    a(q, i) = s * api + c * aqi;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vip = eigenvectors(i, p), viq = eigenvectors(i, q);
                    eigenvectors(i, p) = c * vip - s * viq;
                    eigenvectors(i, q) = s * vip + c * viq;
                }
            }
        }
    }
    eigenvalues.resize(n);
    for (std::size_t i = 0; i < n; ++i) eigenvalues[i] = a(i, i);
}

std::vector<double> rayleigh_ritz(const DenseMatrix& a, DenseMatrix& q) {
    const DenseMatrix aq = matmul(a, q);
    const DenseMatrix small = matmul(transpose(q), aq);  // r x r
    std::vector<double> eigenvalues;
    DenseMatrix rot;
    jacobi_eigen(small, eigenvalues, rot);
    q = matmul(q, rot);
    return eigenvalues;
}

}  // namespace

DenseMatrix low_rank_symmetric(const DenseMatrix& a, std::size_t rank,
                               double tol, std::size_t max_iter) {
    if (a.rows != a.cols) throw UsageError("low_rank_symmetric: matrix not square");
    const std::size_t n = a.rows;
    if (rank < 1 || rank > n)
        throw UsageError("low_rank_symmetric: rank must be in [1, n]");

    // Orthogonal iteration with a small oversampling block; convergence is
    // measured on the dominant-subspace eigenvalues.
    const std::size_t block = std::min(n, rank + 2);
    DenseMatrix q(n, block);
    Rng rng(derive_seed(0x57D, {n, rank}));
    for (double& v : q.data) v = rng.next_unit() - 0.5;
    qr_orthonormalize(q);

    std::vector<double> prev(block, std::numeric_limits<double>::infinity());
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        q = matmul(a, q);
        qr_orthonormalize(q);
        if (iter % 4 == 3 || iter + 1 == max_iter) {
            auto vals = rayleigh_ritz(a, q);
            double change = 0.0;
            for (std::size_t i = 0; i < block; ++i)
                change = std::max(change, std::abs(std::abs(vals[i]) - std::abs(prev[i])));
            prev = vals;
            if (change <= tol * std::max(1.0, std::abs(vals[0]))) break;
        }
    }
    auto vals = rayleigh_ritz(a, q);

    // Keep the r pairs of largest magnitude.
    std::vector<std::size_t> order(block);
    for (std::size_t i = 0; i < block; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return std::abs(vals[x]) > std::abs(vals[y]);
    });
    DenseMatrix out(n, n);
    for (std::size_t k = 0; k < rank; ++k) {
        const std::size_t c = order[k];
        const double lambda = vals[c];
        for (std::size_t i = 0; i < n; ++i) {
            const double qi = q(i, c) * lambda;
            if (qi == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) out(i, j) += qi * q(j, c);
        }
    }
    return out;
}

DenseMatrix low_rank_adjacency(const Graph& g, std::size_t rank) {
    const std::size_t n = g.node_count();
    DenseMatrix a(n, n);
    for (NodeId u = 0; u < n; ++u)
        for (NodeId v : g.neighbors(u)) a(u, v) = 1.0;
    return low_rank_symmetric(a, rank);
}

DenseMatrix svd_filter(const Graph& g, std::size_t rank, bool add_self_loops) {
    const std::size_t n = g.node_count();
    if (rank > n) throw UsageError("svd_filter: rank exceeds node count");
    DenseMatrix a = low_rank_adjacency(g, rank);
    if (add_self_loops)
        for (std::size_t i = 0; i < n; ++i) a(i, i) += 1.0;
    std::vector<double> inv_sqrt(n);
    for (std::size_t i = 0; i < n; ++i) {
        double row_sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) row_sum += a(i, j);
        if (row_sum <= 0.0)
            throw ConvergenceError(
                "svd_filter: non-positive degree after low-rank approximation",
                row_sum);
        inv_sqrt[i] = 1.0 / std::sqrt(row_sum);
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) *= inv_sqrt[i] * inv_sqrt[j];
    return a;
}

const DenseMatrix& VictimModel::proba() const {
    if (const auto* g = std::get_if<GcnModel>(&model)) return g->proba;
    return std::get<SgcModel>(model).proba;
}

double VictimModel::margin_of(NodeId node, int true_class) const {
    const auto& p = proba();
    const auto row = p.row(node);
    const auto truth = static_cast<std::size_t>(true_class);
    double best_other = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < row.size(); ++c)
        if (c != truth) best_other = std::max(best_other, row[c]);
    return row[truth] - best_other;
}

VictimModel train_victim(const LabeledDataset& ds, const Split& split,
                         const VictimConfig& cfg) {
    switch (cfg.kind) {
        case ClassifierKind::Gcn:
            return {train_gcn(ds, split, cfg.train)};
        case ClassifierKind::Sgc:
            return {train_sgc(ds, split, cfg.train, cfg.sgc_power)};
        case ClassifierKind::JaccardGcn: {
            const LabeledDataset filtered = jaccard_filter(ds, cfg.jaccard_threshold);
            return {train_gcn(filtered, split, cfg.train)};
        }
        case ClassifierKind::SvdGcn: {
            Propagation prop(svd_filter(ds.graph, cfg.svd_rank, cfg.train.add_self_loops));
            return {train_gcn(ds, split, cfg.train, &prop)};
        }
    }
    throw UsageError("train_victim: unknown classifier kind");
}

}  // namespace graphrob
