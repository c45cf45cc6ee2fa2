#include "graphrob/graph.hpp"

#include <algorithm>
#include <queue>
#include <string>

namespace graphrob {

Graph Graph::from_edges(std::size_t n,
                        std::span<const std::pair<NodeId, NodeId>> edges) {
    Graph g;
    g.adjacency_.assign(n, {});
    for (const auto& [u, v] : edges) {
        if (u >= n || v >= n)
            throw DataError("build_graph: node id " +
                            std::to_string(std::max(u, v)) + " out of range (n=" +
                            std::to_string(n) + ")");
        if (u == v) continue;
        g.adjacency_[u].push_back(v);
        g.adjacency_[v].push_back(u);
    }
    for (auto& nbrs : g.adjacency_) {
        std::sort(nbrs.begin(), nbrs.end());
        nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
        g.edge_count_ += nbrs.size();
    }
    g.edge_count_ /= 2;
    return g;
}

std::size_t Graph::max_degree() const {
    std::size_t m = 0;
    for (const auto& nbrs : adjacency_) m = std::max(m, nbrs.size());
    return m;
}

bool Graph::has_edge(NodeId u, NodeId v) const {
    const auto& nbrs = adjacency_[u];
    return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

std::vector<std::pair<NodeId, NodeId>> Graph::edges() const {
    std::vector<std::pair<NodeId, NodeId>> out;
    out.reserve(edge_count_);
    for (NodeId u = 0; u < adjacency_.size(); ++u)
        for (NodeId v : adjacency_[u])
            if (u < v) out.emplace_back(u, v);
    return out;
}

Graph Graph::with_edge_flip(NodeId u, NodeId v, bool add) const {
    if (u == v) throw UsageError("edge flip: self-loop");
    if (u >= node_count() || v >= node_count())
        throw UsageError("edge flip: node id out of range");
    Graph g = *this;
    auto flip_row = [&](NodeId a, NodeId b) {
        auto& nbrs = g.adjacency_[a];
        auto it = std::lower_bound(nbrs.begin(), nbrs.end(), b);
        if (add) {
            if (it != nbrs.end() && *it == b)
                throw UsageError("edge flip: edge already present");
            nbrs.insert(it, b);
        } else {
            if (it == nbrs.end() || *it != b)
                throw UsageError("edge flip: edge not present");
            nbrs.erase(it);
        }
    };
    flip_row(u, v);
    flip_row(v, u);
    g.edge_count_ += add ? 1 : -1;
    return g;
}

std::vector<std::size_t> connected_component_labels(const Graph& g) {
    const std::size_t n = g.node_count();
    std::vector<std::size_t> label(n, SIZE_MAX);
    std::size_t next = 0;
    std::vector<NodeId> stack;
    for (NodeId s = 0; s < n; ++s) {
        if (label[s] != SIZE_MAX) continue;
        label[s] = next;
        stack.push_back(s);
        while (!stack.empty()) {
            NodeId u = stack.back();
            stack.pop_back();
            for (NodeId v : g.neighbors(u)) {
                if (label[v] == SIZE_MAX) {
                    label[v] = next;
                    stack.push_back(v);
                }
            }
        }
        ++next;
    }
    return label;
}

std::size_t connected_component_count(const Graph& g) {
    const auto labels = connected_component_labels(g);
    std::size_t m = 0;
    for (std::size_t l : labels) m = std::max(m, l + 1);
    return g.node_count() == 0 ? 0 : m;
}

LccResult largest_connected_component(const Graph& g) {
    const std::size_t n = g.node_count();
    if (n == 0) throw DataError("largest_connected_component: empty graph");

    const auto labels = connected_component_labels(g);
    std::size_t num_components = 0;
    for (std::size_t l : labels) num_components = std::max(num_components, l + 1);
    std::vector<std::size_t> size(num_components, 0);
    for (std::size_t l : labels) ++size[l];

    // Components are labeled in order of smallest member, so the first
    // maximal-size label realizes the smallest-id tie-break.
    std::size_t best = 0;
    for (std::size_t c = 1; c < num_components; ++c)
        if (size[c] > size[best]) best = c;

    LccResult res;
    res.old_to_new.assign(n, -1);
    for (NodeId u = 0; u < n; ++u) {
        if (labels[u] == best) {
            res.old_to_new[u] = static_cast<long long>(res.new_to_old.size());
            res.new_to_old.push_back(u);
        }
    }
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId u : res.new_to_old)
        for (NodeId v : g.neighbors(u))
            if (u < v)
                edges.emplace_back(static_cast<NodeId>(res.old_to_new[u]),
                                   static_cast<NodeId>(res.old_to_new[v]));
    res.graph = Graph::from_edges(res.new_to_old.size(), edges);
    return res;
}

}  // namespace graphrob
