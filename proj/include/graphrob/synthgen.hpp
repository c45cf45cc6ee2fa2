#ifndef GRAPHROB_SYNTHGEN_HPP
#define GRAPHROB_SYNTHGEN_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "graphrob/dataset.hpp"

namespace graphrob {

enum class TopologyModel { ER, BA, WS, LFR };

struct TopologySpec {
    TopologyModel model = TopologyModel::ER;
    std::size_t n = 1200;
    // ER
    double er_p = 1.0 / 120.0;
    // BA: each new node attaches ba_m edges; process starts from a star.
    std::size_t ba_m = 5;
    std::size_t ba_seed_star = 6;
    // WS: ring lattice with ws_k_side neighbors on each side, then rewiring.
    std::size_t ws_k_side = 5;
    double ws_rewire_p = 0.1;
    // LFR-style planted partition.
    double lfr_degree_exponent = 3.0;
    double lfr_avg_degree = 10.0;
    std::size_t lfr_max_degree = 135;
    double lfr_community_exponent = 2.0;
    std::size_t lfr_min_community = 10;
    double lfr_mixing = 0.2;

    std::uint64_t seed = 0;
};

struct LabelConfig {
    /// Fraction of the initial homophily gap to keep: 1.0 leaves the spectral
    /// labels untouched, 0.5 halves the gap, 0.0 removes it.
    double target_delta_fraction = 1.0;
    std::uint64_t seed = 0;
};

struct AttributeConfig {
    std::size_t num_attrs = 100;
    double p0 = 0.5;   // base probability scale
    double tau = 20.0; // exponential decay constant
    std::size_t shift = 0;
    bool one_hot_index = false;

    /// Probability that attribute j of a class-0 node is set.
    double base_probability(std::size_t j) const;
};

/// Raw draw from the topology model, before component extraction.
Graph sample_topology(const TopologySpec& spec);

/// Largest connected component of a raw draw.
Graph generate_topology(const TopologySpec& spec);

/// Raw LFR-style draw with its planted community assignment.
struct LfrSample {
    Graph graph;
    std::vector<std::size_t> community;
};
LfrSample sample_lfr_topology(const TopologySpec& spec);

/// Spectral bipartition labels: nodes carrying the floor(N/2) smallest Fiedler
/// entries get label 0, ties by smallest id.
std::vector<int> assign_labels_high_homophily(const Graph& g);

/// Homophily gap |E00| + |E11| - |E01|.
long long homophily_delta(const Graph& g, std::span<const int> labels);

/// One label swap: a class-1 node with at least as many class-1 as class-0
/// neighbors moves to class 0 and vice versa, both drawn with probability
/// proportional to |(Ax)_u|. Class sizes are preserved. Throws StallError
/// when either side has no eligible node.
std::vector<int> swap2reduce_step(const Graph& g, std::span<const int> labels,
                                  std::uint64_t seed);

/// Repeated swaps until the homophily gap drops to target_delta or below.
std::vector<int> reduce_homophily_to(const Graph& g, std::span<const int> labels,
                                     long long target_delta,
                                     std::size_t max_steps, std::uint64_t seed);

/// Class-conditional Bernoulli attributes: class 0 uses q_j = p0*exp(-j/tau),
/// class 1 the circularly shifted curve q_{(j+shift) mod num_attrs}. With
/// one_hot_index an identity block is appended.
BinaryMatrix generate_attributes(const Graph& g, std::span<const int> labels,
                                 const AttributeConfig& cfg, std::uint64_t seed);

/// Monte-Carlo accuracy of a likelihood-ratio classifier over the two shifted
/// attribute distributions; per trial, per-attribute Bernoulli parameters are
/// estimated from train_per_class samples of each class.
double glrt_accuracy(const AttributeConfig& cfg, std::size_t shift,
                     std::size_t trials, std::size_t train_per_class,
                     std::size_t heldout_per_class, std::uint64_t seed);

/// Smallest circular shift whose measured GLRT accuracy is within 0.02 of
/// target_acc (binary search; accuracy is monotone in the shift).
std::size_t calibrate_attribute_shift(const AttributeConfig& cfg,
                                      double target_acc, std::size_t trials,
                                      std::uint64_t seed);

/// Cross-class edge count normalized by its expectation under random
/// rewiring: |E01| / (|V0||V1| M / C(N,2)).
double heterophilicity(const Graph& g, std::span<const int> labels);

/// Complete synthetic dataset: topology -> LCC -> spectral labels ->
/// homophily tuning -> attributes.
struct SyntheticSpec {
    TopologySpec topology;
    LabelConfig labels;
    std::optional<AttributeConfig> attributes;
};

struct SyntheticResult {
    LabeledDataset dataset;
    long long initial_delta = 0;
    long long final_delta = 0;
    double heterophilicity = 0.0;
};

SyntheticResult generate_dataset(const SyntheticSpec& spec);

}  // namespace graphrob

#endif
