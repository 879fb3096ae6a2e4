#pragma once

#include <vector>

namespace crtcover {

// Finite rooted tree with positive real edge lengths; node 0 is the root.
// grid_label keeps the excursion grid index a node came from (-1 when the
// node was synthesized as a branch point).
struct RealTree {
    struct Node {
        int parent = -1;
        double edge_length = 0.0;  // to parent; 0 only for the root
        double height = 0.0;       // distance from the root
        int grid_label = -1;
        std::vector<int> children;
    };
    std::vector<Node> nodes;

    int size() const { return static_cast<int>(nodes.size()); }

    int add_node(int parent, double edge_length, int grid_label = -1) {
        Node node;
        node.parent = parent;
        node.edge_length = edge_length;
        node.grid_label = grid_label;
        node.height = parent < 0 ? 0.0 : nodes[parent].height + edge_length;
        nodes.push_back(node);
        const int id = size() - 1;
        if (parent >= 0) nodes[parent].children.push_back(id);
        return id;
    }

    static RealTree single_root() {
        RealTree t;
        t.add_node(-1, 0.0, 0);
        return t;
    }

    // Path metric; O(depth) per query via parent walks.
    double distance(int u, int v) const;
    int lowest_common_ancestor(int u, int v) const;
    bool valid() const;
};

}  // namespace crtcover
