#include "crtcover/real_tree.hpp"

#include <algorithm>
#include <cmath>

namespace crtcover {

int RealTree::lowest_common_ancestor(int u, int v) const {
    // Walk the deeper-by-height node up until the paths merge.
    auto depth_of = [&](int w) {
        int d = 0;
        for (int cur = w; nodes[cur].parent >= 0; cur = nodes[cur].parent) ++d;
        return d;
    };
    int du = depth_of(u), dv = depth_of(v);
    while (du > dv) {
        u = nodes[u].parent;
        --du;
    }
    while (dv > du) {
        v = nodes[v].parent;
        --dv;
    }
    while (u != v) {
        u = nodes[u].parent;
        v = nodes[v].parent;
    }
    return u;
}

double RealTree::distance(int u, int v) const {
    const int w = lowest_common_ancestor(u, v);
    return nodes[u].height + nodes[v].height - 2.0 * nodes[w].height;
}

bool RealTree::valid() const {
    if (nodes.empty() || nodes[0].parent != -1) return false;
    for (int i = 0; i < size(); ++i) {
        const auto& node = nodes[i];
        if (i == 0) continue;
        if (node.parent < 0 || node.parent >= size()) return false;
        if (!(node.edge_length > 0.0)) return false;
        if (std::fabs(node.height - nodes[node.parent].height - node.edge_length) >
            1e-9 * std::max(1.0, node.height)) {
            return false;
        }
        const auto& sibs = nodes[node.parent].children;
        if (std::find(sibs.begin(), sibs.end(), i) == sibs.end()) return false;
    }
    return true;
}

}  // namespace crtcover
