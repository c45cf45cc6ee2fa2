#ifndef GRAPHROB_GRAPH_HPP
#define GRAPHROB_GRAPH_HPP

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "graphrob/common.hpp"

namespace graphrob {

/// Immutable undirected simple graph. Self-loops and duplicate edges are
/// dropped at construction; adjacency lists are kept sorted.
class Graph {
public:
    Graph() = default;

    static Graph from_edges(std::size_t n,
                            std::span<const std::pair<NodeId, NodeId>> edges);

    std::size_t node_count() const { return adjacency_.size(); }
    std::size_t edge_count() const { return edge_count_; }

    std::span<const NodeId> neighbors(NodeId u) const { return adjacency_[u]; }
    std::size_t degree(NodeId u) const { return adjacency_[u].size(); }
    std::size_t max_degree() const;
    bool has_edge(NodeId u, NodeId v) const;

    /// All edges as (u,v) with u < v, sorted lexicographically.
    std::vector<std::pair<NodeId, NodeId>> edges() const;

    /// Copy with one edge toggled. Adding an existing edge or removing a
    /// missing one is rejected.
    Graph with_edge_flip(NodeId u, NodeId v, bool add) const;

private:
    std::vector<std::vector<NodeId>> adjacency_;
    std::size_t edge_count_ = 0;
};

struct LccResult {
    Graph graph;
    /// old id -> new id, -1 for dropped nodes.
    std::vector<long long> old_to_new;
    /// new id -> old id.
    std::vector<NodeId> new_to_old;
};

/// Largest connected component; ties between equal-size components go to the
/// one containing the smallest original id. Kept nodes preserve id order.
LccResult largest_connected_component(const Graph& g);

/// Component label per node (labels are 0-based in order of smallest member).
std::vector<std::size_t> connected_component_labels(const Graph& g);
std::size_t connected_component_count(const Graph& g);

}  // namespace graphrob

#endif
