#ifndef GRAPHROB_SELECTION_HPP
#define GRAPHROB_SELECTION_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "graphrob/dataset.hpp"

namespace graphrob {

/// Disjoint train/validation/test node sets, stratified by class. The three
/// sets are kept sorted and partition the node set.
struct Split {
    std::vector<NodeId> train;
    std::vector<NodeId> val;
    std::vector<NodeId> test;
    /// per class: {train, val, test} counts
    std::vector<std::array<std::size_t, 3>> class_counts;
    std::string method;
    std::uint64_t seed = 0;
    std::optional<int> final_k;

    void validate(const LabeledDataset& ds) const;
};

/// Coverage bookkeeping for GreedyCover: m[u] is the number of training
/// neighbors of u, with -1 marking selected nodes.
struct CoverState {
    int k = 0;
    std::vector<int> m;
};

enum class CoverScanMode { FullScan, PriorityQueue };

struct GreedyCoverResult {
    Split split;
    int final_k = 0;
};

/// Stratified random split. Per-class train/val quotas come from
/// largest-fractional-part apportionment of t*|V_c| with global totals
/// round(t*N); every class keeps at least one train node.
Split stratified_random_split(const LabeledDataset& ds, double t_train,
                              double t_val, std::uint64_t seed);

/// Highest-degree nodes per class (ties by smallest id) fill the train quota;
/// validation is random-stratified from the remainder.
Split strat_degree_select(const LabeledDataset& ds, double t_train,
                          std::uint64_t seed, double t_val = 0.1);

/// Iterative cover selection: repeatedly draw a class with probability
/// proportional to its unmet quota fraction and select the node with the most
/// neighbors having exactly k training neighbors; k grows when no candidate
/// has any. Both scan modes produce identical results; the priority-queue
/// mode maintains candidate scores incrementally in per-score buckets.
GreedyCoverResult greedy_cover_select(
    const LabeledDataset& ds, double t_train, std::uint64_t seed,
    double t_val = 0.1, CoverScanMode mode = CoverScanMode::PriorityQueue);

/// Average number of edges from the training set to each node outside it:
/// (1/|V\T|) * sum_{i in T} sum_{j not in T} a_ij.
double avg_external_training_neighbors(const Graph& g,
                                       std::span<const NodeId> train);

/// Largest-fractional-part apportionment of fraction*size_c with global total
/// round(fraction*N); ties by smallest class index.
std::vector<std::size_t> apportion_largest_remainder(
    std::span<const std::size_t> class_sizes, double fraction);

}  // namespace graphrob

#endif
