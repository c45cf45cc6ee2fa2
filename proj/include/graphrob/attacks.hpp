#ifndef GRAPHROB_ATTACKS_HPP
#define GRAPHROB_ATTACKS_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "graphrob/models.hpp"

namespace graphrob {

enum class AttackKind { SurrogateGreedy, Fga, Sga };
enum class AttackMode { Direct, Influence };

struct AttackSpec {
    AttackKind kind = AttackKind::SurrogateGreedy;
    AttackMode mode = AttackMode::Direct;
    std::size_t budget = 0;  // 0 picks the mode default (direct 20, influence 50)
    std::size_t sga_hops = 2;

    std::size_t effective_budget() const {
        if (budget > 0) return budget;
        return mode == AttackMode::Direct ? 20 : 50;
    }
};

struct EdgeFlip {
    NodeId u = 0;
    NodeId v = 0;
    bool add = true;

    friend bool operator==(const EdgeFlip&, const EdgeFlip&) = default;
};

struct AttackResult {
    NodeId target = 0;
    std::vector<EdgeFlip> flips;
    /// Victim-model margin of the target after 0..|flips| flips.
    std::vector<double> margins;
    bool success = false;
    std::size_t required_budget = 0;
};

/// Legal flips for a target. Direct mode: all flips incident to the target;
/// influence mode: flips incident to the target's neighbors but not to the
/// target itself. No self-loops; removals that would isolate a node are
/// excluded. Output is sorted by (u, v, add-before-remove).
std::vector<EdgeFlip> candidate_flips(const Graph& g, NodeId target,
                                      AttackMode mode);

/// Precomputed clean-data models shared by attacks on many targets of the
/// same (dataset, split, config). Both are deterministic functions of their
/// inputs, so sharing does not change any attack result.
struct CleanModels {
    VictimModel victim;
    SgcModel surrogate;
};

CleanModels train_clean_models(const LabeledDataset& ds, const Split& split,
                               const VictimConfig& victim_cfg);

/// Greedy structure poisoning scored by a linear surrogate trained once on
/// clean data; the victim is retrained after every applied flip.
AttackResult surrogate_greedy_attack(const LabeledDataset& ds, const Split& split,
                                     const VictimConfig& victim_cfg, NodeId target,
                                     const AttackSpec& spec,
                                     const CleanModels* clean = nullptr);

/// Gradient-guided poisoning: per step flips the candidate adjacency entry
/// with the largest loss-increasing symmetrized gradient.
AttackResult fga_attack(const LabeledDataset& ds, const Split& split,
                        const VictimConfig& victim_cfg, NodeId target,
                        const AttackSpec& spec,
                        const CleanModels* clean = nullptr);

/// Surrogate greedy attack with candidates restricted to the k-hop subgraph
/// around the target; scorer and victim are both the SGC model.
AttackResult sga_attack(const LabeledDataset& ds, const Split& split,
                        const VictimConfig& victim_cfg, NodeId target,
                        const AttackSpec& spec,
                        const CleanModels* clean = nullptr);

/// Smallest number of flips after which the margin is negative, or max_budget
/// when the attack never succeeds.
std::size_t required_budget(std::span<const double> margins,
                            std::size_t max_budget);

/// Target's surrogate classification margin on the graph with an optional
/// hypothetical flip applied. Exposed for exhaustive step-optimality checks.
double surrogate_margin_after_flip(const Graph& g, const BinaryMatrix& attrs,
                                   const DenseMatrix& w, std::size_t power,
                                   bool add_self_loops, bool row_normalize,
                                   NodeId target, int true_class,
                                   const std::optional<EdgeFlip>& flip);

/// Symmetrized gradients g_uv + g_vu of the target's cross-entropy loss with
/// respect to the adjacency entries named by the candidate flips.
std::vector<double> fga_flip_gradients(const VictimModel& model,
                                       const LabeledDataset& ds, NodeId target,
                                       std::span<const EdgeFlip> candidates);

/// Nodes within `hops` of the target, sorted. BFS on the current graph.
std::vector<NodeId> k_hop_nodes(const Graph& g, NodeId target, std::size_t hops);

}  // namespace graphrob

#endif
