#ifndef GRAPHROB_DATASET_HPP
#define GRAPHROB_DATASET_HPP

#include <vector>

#include "graphrob/graph.hpp"
#include "graphrob/matrix.hpp"

namespace graphrob {

/// Attributed graph with one class label per node. Labels are 0..num_classes-1.
struct LabeledDataset {
    Graph graph;
    BinaryMatrix attributes;  // rows == node count; cols may be 0
    std::vector<int> labels;
    int num_classes = 0;

    std::size_t node_count() const { return graph.node_count(); }

    void validate() const;

    /// Node ids per class, sorted ascending.
    std::vector<std::vector<NodeId>> class_members() const;
};

}  // namespace graphrob

#endif
