#include "graphrob/dataset.hpp"

#include <string>

namespace graphrob {

void LabeledDataset::validate() const {
    const std::size_t n = graph.node_count();
    if (labels.size() != n)
        throw DataError("dataset: label count " + std::to_string(labels.size()) +
                        " does not match node count " + std::to_string(n));
    if (attributes.rows != n)
        throw DataError("dataset: attribute row count does not match node count");
    if (num_classes <= 0) throw DataError("dataset: num_classes must be positive");
    for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] < 0 || labels[i] >= num_classes)
            throw DataError("dataset: label " + std::to_string(labels[i]) +
                            " of node " + std::to_string(i) + " out of range");
    }
    for (const auto& sup : attributes.row_support) {
        for (NodeId j : sup) {
            if (j >= attributes.cols)
                throw DataError("dataset: attribute index out of range");
        }
    }
}

std::vector<std::vector<NodeId>> LabeledDataset::class_members() const {
    std::vector<std::vector<NodeId>> members(static_cast<std::size_t>(num_classes));
    for (NodeId u = 0; u < labels.size(); ++u)
        members[static_cast<std::size_t>(labels[u])].push_back(u);
    return members;
}

}  // namespace graphrob
