#ifndef GRAPHROB_MODELS_HPP
#define GRAPHROB_MODELS_HPP

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "graphrob/dataset.hpp"
#include "graphrob/selection.hpp"

namespace graphrob {

struct TrainConfig {
    std::size_t hidden = 16;
    double learning_rate = 0.01;
    double weight_decay = 5e-4;
    std::size_t epochs = 200;
    std::size_t patience = 30;
    double dropout = 0.0;
    bool add_self_loops = true;
    bool row_normalize = true;
    std::uint64_t seed = 0;
};

/// Feature propagation operator: the sparse normalized adjacency, or a dense
/// replacement such as a low-rank filtered one.
class Propagation {
public:
    Propagation() = default;
    explicit Propagation(SparseMatrix m) : op_(std::move(m)) {}
    explicit Propagation(DenseMatrix m) : op_(std::move(m)) {}

    DenseMatrix apply(const DenseMatrix& x) const;
    std::size_t size() const;
    bool is_dense() const { return std::holds_alternative<DenseMatrix>(op_); }

private:
    std::variant<SparseMatrix, DenseMatrix> op_;
};

/// Builds the classifier propagation operator from a graph.
Propagation build_propagation(const Graph& g, bool add_self_loops);

/// Two-layer graph convolution network with softmax output.
struct GcnModel {
    DenseMatrix w1;  // d x h
    DenseMatrix w2;  // h x C
    Propagation prop;
    TrainConfig config;
    int num_classes = 0;
    std::size_t best_epoch = 0;
    double best_val_loss = 0.0;
    /// Softmax outputs on the dataset the model was trained on.
    DenseMatrix proba;

    DenseMatrix predict_proba(const BinaryMatrix& attrs) const;
};

/// Linearized surrogate: softmax((D^{-1/2}AD^{-1/2})^k X W), fit by logistic
/// regression.
struct SgcModel {
    DenseMatrix w;  // d x C
    std::size_t power = 2;
    Propagation prop;
    TrainConfig config;
    int num_classes = 0;
    std::size_t best_epoch = 0;
    double best_val_loss = 0.0;
    DenseMatrix proba;

    DenseMatrix predict_proba(const BinaryMatrix& attrs) const;
};

GcnModel train_gcn(const LabeledDataset& ds, const Split& split,
                   const TrainConfig& cfg,
                   const Propagation* prop_override = nullptr);

/// k-fold application of the propagation operator to the attribute matrix.
DenseMatrix sgc_features(const Graph& g, const BinaryMatrix& attrs,
                         std::size_t k, bool add_self_loops = true,
                         bool row_normalize = true);

SgcModel train_sgc(const LabeledDataset& ds, const Split& split,
                   const TrainConfig& cfg, std::size_t k = 2);

struct NodePrediction {
    NodeId node = 0;
    int predicted = 0;
    double margin = 0.0;
};

/// Predicted class (argmax, ties by smallest index) and classification margin
/// Y[v][c*] - max_{c != c*} Y[v][c] against the true class.
std::vector<NodePrediction> predict_margins(const DenseMatrix& proba,
                                            std::span<const int> labels,
                                            std::span<const NodeId> nodes);

struct Metrics {
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    std::vector<double> per_class_f1;
};

Metrics evaluate_metrics(const DenseMatrix& proba, std::span<const int> labels,
                         std::span<const NodeId> nodes, int num_classes);

/// Removes every edge whose endpoint attribute vectors have Jaccard
/// similarity <= threshold. Endpoints with empty supports count as 0.
LabeledDataset jaccard_filter(const LabeledDataset& ds, double threshold = 0.0);

/// Best rank-r approximation (Frobenius) of a symmetric matrix via orthogonal
/// iteration on the dominant-|eigenvalue| subspace.
DenseMatrix low_rank_symmetric(const DenseMatrix& a, std::size_t rank,
                               double tol = 1e-8, std::size_t max_iter = 2000);

/// Rank-r approximation of the graph adjacency matrix.
DenseMatrix low_rank_adjacency(const Graph& g, std::size_t rank);

/// Low-rank adjacency turned into a propagation operator (self-loops added
/// and symmetric normalization applied on the approximated matrix).
DenseMatrix svd_filter(const Graph& g, std::size_t rank,
                       bool add_self_loops = true);

enum class ClassifierKind { Gcn, Sgc, JaccardGcn, SvdGcn };

struct VictimConfig {
    ClassifierKind kind = ClassifierKind::Gcn;
    TrainConfig train;
    double jaccard_threshold = 0.0;
    std::size_t svd_rank = 10;
    std::size_t sgc_power = 2;
};

/// Classifier behind its optional defense preprocessor, trained end to end on
/// one dataset.
struct VictimModel {
    std::variant<GcnModel, SgcModel> model;

    const DenseMatrix& proba() const;
    double margin_of(NodeId node, int true_class) const;
};

VictimModel train_victim(const LabeledDataset& ds, const Split& split,
                         const VictimConfig& cfg);

namespace detail {

/// Loss (cross-entropy over `nodes` plus L2 weight decay) and, when gradient
/// outputs are non-null, its analytic gradients. Shared by training and the
/// finite-difference checks.
double gcn_loss_and_gradients(const Propagation& prop, const BinaryMatrix& attrs,
                              bool row_normalize, std::span<const int> labels,
                              std::span<const NodeId> nodes, const DenseMatrix& w1,
                              const DenseMatrix& w2, double weight_decay,
                              DenseMatrix* grad_w1, DenseMatrix* grad_w2,
                              DenseMatrix* out_proba = nullptr,
                              const std::vector<char>* dropout_mask = nullptr,
                              double dropout = 0.0);

double sgc_loss_and_gradient(const DenseMatrix& features,
                             std::span<const int> labels,
                             std::span<const NodeId> nodes, const DenseMatrix& w,
                             double weight_decay, DenseMatrix* grad_w,
                             DenseMatrix* out_proba = nullptr);

DenseMatrix binary_to_dense(const BinaryMatrix& x, bool row_normalize);

}  // namespace detail

}  // namespace graphrob

#endif
