#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace crtcover {

// Rooted finite tree. Vertex ids are depth-first (preorder), so contour and
// Lukasiewicz encodings are index-stable. parent[root] == -1.
struct DiscreteTree {
    int n = 0;
    int root = 0;
    std::vector<int> parent;
    std::vector<std::vector<int>> children;

    static DiscreteTree single_vertex();
    // Decode a preorder offspring sequence (valid Lukasiewicz encoding).
    static DiscreteTree from_offspring(const std::vector<int>& offspring);
    static DiscreteTree path(int n);

    bool valid() const;
    int degree(int v) const {
        return static_cast<int>(children[v].size()) + (v == root ? 0 : 1);
    }
};

// Depth + Euler-tour sparse-table LCA: O(n log n) build, O(1) query. The
// walk oracles and covering routines issue many queries, hence the table.
class TreeMetricIndex {
public:
    explicit TreeMetricIndex(const DiscreteTree& tree);

    const DiscreteTree& tree() const { return *tree_; }
    int depth(int v) const { return depth_[v]; }
    int lca(int u, int v) const;

    int graph_distance(int u, int v) const {
        const int w = lca(u, v);
        return depth_[u] + depth_[v] - 2 * depth_[w];
    }

    // The unique vertex on all three pairwise paths: the deepest of the
    // pairwise LCAs.
    int branch_point(int x, int y, int z) const;

private:
    const DiscreteTree* tree_;
    std::vector<int> depth_;
    std::vector<int> euler_;       // vertex at each tour position
    std::vector<int> first_seen_;  // first tour position of each vertex
    std::vector<std::vector<int>> table_;  // sparse table of argmin-by-depth
    std::vector<int> log2_;

    int shallower(int a, int b) const {
        return depth_[euler_[a]] <= depth_[euler_[b]] ? a : b;
    }
};

struct ContourPath {
    // 2(n-1)+1 values; starts and ends at 0, steps of +-1, max = height.
    std::vector<int> values;
};

int diameter(const DiscreteTree& tree);

// Minimal vertex set within distance r of every vertex (leaf-up greedy,
// exact on trees).
int covering_number(const DiscreteTree& tree, int r);

ContourPath contour_path(const DiscreteTree& tree);

// n^{-1/2} C(2(n-1)t) with linear interpolation, t in [0,1].
double normalized_contour(const DiscreteTree& tree, const ContourPath& contour,
                          double t);

// All rooted trees with exactly n vertices, one per isomorphism class
// (level-sequence successor generation).
void for_each_rooted_tree(int n, const std::function<void(const DiscreteTree&)>& fn);

// Canonical shape string (children sorted recursively); equal iff the rooted
// trees are isomorphic.
std::string canonical_shape(const DiscreteTree& tree);

std::vector<int> bfs_distances(const DiscreteTree& tree, int source);

}  // namespace crtcover
