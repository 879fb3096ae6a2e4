#include "crtcover/discrete_tree.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace crtcover {

DiscreteTree DiscreteTree::single_vertex() {
    DiscreteTree t;
    t.n = 1;
    t.root = 0;
    t.parent = {-1};
    t.children = {{}};
    return t;
}

DiscreteTree DiscreteTree::from_offspring(const std::vector<int>& offspring) {
    const int n = static_cast<int>(offspring.size());
    if (n == 0) throw std::invalid_argument("from_offspring: empty sequence");
    DiscreteTree t;
    t.n = n;
    t.root = 0;
    t.parent.assign(n, -1);
    t.children.assign(n, {});
    // Preorder decode: a stack of vertices with unfilled child slots.
    std::vector<std::pair<int, int>> stack;
    stack.emplace_back(0, offspring[0]);
    for (int v = 1; v < n; ++v) {
        while (!stack.empty() && stack.back().second == 0) stack.pop_back();
        if (stack.empty()) throw std::invalid_argument("from_offspring: invalid encoding");
        --stack.back().second;
        t.parent[v] = stack.back().first;
        t.children[t.parent[v]].push_back(v);
        stack.emplace_back(v, offspring[v]);
    }
    while (!stack.empty() && stack.back().second == 0) stack.pop_back();
    if (!stack.empty()) throw std::invalid_argument("from_offspring: leftover child slots");
    return t;
}

DiscreteTree DiscreteTree::path(int n) {
    if (n < 1) throw std::invalid_argument("path: n < 1");
    std::vector<int> offspring(n, 1);
    offspring[n - 1] = 0;
    return from_offspring(offspring);
}

bool DiscreteTree::valid() const {
    if (n <= 0 || static_cast<int>(parent.size()) != n ||
        static_cast<int>(children.size()) != n) {
        return false;
    }
    int roots = 0;
    std::vector<int> seen(n, 0);
    for (int v = 0; v < n; ++v) {
        if (parent[v] < 0) {
            ++roots;
            if (v != root) return false;
            continue;
        }
        const auto& sibs = children[parent[v]];
        if (std::find(sibs.begin(), sibs.end(), v) == sibs.end()) return false;
    }
    if (roots != 1) return false;
    // Every vertex must reach the root without cycles.
    for (int v = 0; v < n; ++v) {
        int cur = v, steps = 0;
        while (cur != root) {
            cur = parent[cur];
            if (cur < 0 || ++steps > n) return false;
        }
    }
    int child_total = 0;
    for (const auto& c : children) child_total += static_cast<int>(c.size());
    return child_total == n - 1;
}

TreeMetricIndex::TreeMetricIndex(const DiscreteTree& tree) : tree_(&tree) {
    const int n = tree.n;
    depth_.assign(n, 0);
    first_seen_.assign(n, -1);
    euler_.reserve(2 * n);

    // Iterative Euler tour: each vertex appears once on entry and once
    // after each child returns (2n-1 entries total).
    std::vector<std::pair<int, std::size_t>> stack;
    stack.emplace_back(tree.root, 0);
    depth_[tree.root] = 0;
    first_seen_[tree.root] = 0;
    euler_.push_back(tree.root);
    while (!stack.empty()) {
        auto& [v, idx] = stack.back();
        if (idx < tree.children[v].size()) {
            const int c = tree.children[v][idx];
            ++idx;
            depth_[c] = depth_[v] + 1;
            first_seen_[c] = static_cast<int>(euler_.size());
            euler_.push_back(c);
            stack.emplace_back(c, 0);
        } else {
            stack.pop_back();
            if (!stack.empty()) euler_.push_back(stack.back().first);
        }
    }

    const int m = static_cast<int>(euler_.size());
    log2_.assign(m + 1, 0);
    for (int i = 2; i <= m; ++i) log2_[i] = log2_[i / 2] + 1;
    const int levels = log2_[m] + 1;
    table_.assign(levels, std::vector<int>(m));
    for (int i = 0; i < m; ++i) table_[0][i] = i;
    for (int j = 1; j < levels; ++j) {
        for (int i = 0; i + (1 << j) <= m; ++i) {
            table_[j][i] = shallower(table_[j - 1][i], table_[j - 1][i + (1 << (j - 1))]);
        }
    }
}

int TreeMetricIndex::lca(int u, int v) const {
    if (u == v) return u;
    int a = first_seen_[u];
    int b = first_seen_[v];
    if (a > b) std::swap(a, b);
    const int j = log2_[b - a + 1];
    return euler_[shallower(table_[j][a], table_[j][b - (1 << j) + 1])];
}

int TreeMetricIndex::branch_point(int x, int y, int z) const {
    const int a = lca(x, y);
    const int b = lca(y, z);
    const int c = lca(z, x);
    // Two of the three coincide (the shallowest); the remaining one is the
    // median vertex.
    if (a == b) return c;
    if (a == c) return b;
    return a;
}

std::vector<int> bfs_distances(const DiscreteTree& tree, int source) {
    std::vector<int> dist(tree.n, -1);
    std::vector<int> queue;
    queue.reserve(tree.n);
    queue.push_back(source);
    dist[source] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const int v = queue[head];
        const int p = tree.parent[v];
        if (p >= 0 && dist[p] < 0) {
            dist[p] = dist[v] + 1;
            queue.push_back(p);
        }
        for (int c : tree.children[v]) {
            if (dist[c] < 0) {
                dist[c] = dist[v] + 1;
                queue.push_back(c);
            }
        }
    }
    return dist;
}

int diameter(const DiscreteTree& tree) {
    if (tree.n <= 0) throw std::invalid_argument("diameter: empty tree");
    auto d0 = bfs_distances(tree, tree.root);
    const int far = static_cast<int>(std::max_element(d0.begin(), d0.end()) - d0.begin());
    auto d1 = bfs_distances(tree, far);
    return *std::max_element(d1.begin(), d1.end());
}

int covering_number(const DiscreteTree& tree, int r) {
    if (r < 0) throw std::invalid_argument("covering_number: r < 0");
    if (r == 0) return tree.n;

    // Vertices in reverse preorder = children before parents.
    // uncov[v]: max distance from v to an uncovered vertex in v's subtree
    //           (-1 if none).
    // reach[v]: max remaining coverage radius at v from a center in v's
    //           subtree (-1 if none).
    std::vector<int> uncov(tree.n, -1), reach(tree.n, -1);
    int centers = 0;
    for (int v = tree.n - 1; v >= 0; --v) {
        int u = -1, c = -1;
        for (int child : tree.children[v]) {
            if (uncov[child] >= 0) u = std::max(u, uncov[child] + 1);
            if (reach[child] >= 1) c = std::max(c, reach[child] - 1);
        }
        if (c < 0) u = std::max(u, 0);   // no center within r of v
        if (u >= 0 && c >= u) u = -1;    // deepest reach covers every holdout
        if (u == r || (v == tree.root && u >= 0)) {
            // A center must be placed here: an uncovered vertex would fall
            // out of range one level up (or we ran out of tree).
            ++centers;
            c = std::max(c, r);
            u = -1;
        }
        uncov[v] = u;
        reach[v] = c;
    }
    return centers;
}

ContourPath contour_path(const DiscreteTree& tree) {
    if (tree.n < 2) throw std::invalid_argument("contour_path: degenerate for n < 2");
    ContourPath path;
    path.values.reserve(2 * (tree.n - 1) + 1);
    std::vector<std::pair<int, std::size_t>> stack;
    stack.emplace_back(tree.root, 0);
    int depth = 0;
    path.values.push_back(0);
    while (!stack.empty()) {
        auto& [v, idx] = stack.back();
        if (idx < tree.children[v].size()) {
            const int c = tree.children[v][idx];
            ++idx;
            stack.emplace_back(c, 0);
            path.values.push_back(++depth);
        } else {
            stack.pop_back();
            if (!stack.empty()) path.values.push_back(--depth);
        }
    }
    return path;
}

double normalized_contour(const DiscreteTree& tree, const ContourPath& contour,
                          double t) {
    if (t < 0.0 || t > 1.0) throw std::invalid_argument("normalized_contour: t outside [0,1]");
    const double span = 2.0 * static_cast<double>(tree.n - 1);
    const double pos = span * t;
    const auto lo = static_cast<std::size_t>(pos);
    const double scale = 1.0 / std::sqrt(static_cast<double>(tree.n));
    if (lo + 1 >= contour.values.size()) return scale * contour.values.back();
    const double frac = pos - static_cast<double>(lo);
    return scale * ((1.0 - frac) * contour.values[lo] + frac * contour.values[lo + 1]);
}

void for_each_rooted_tree(int n, const std::function<void(const DiscreteTree&)>& fn) {
    if (n < 1) return;
    if (n == 1) {
        fn(DiscreteTree::single_vertex());
        return;
    }
    // Beyer-Hedetniemi successor generation over canonical level sequences.
    std::vector<int> level(n);
    for (int i = 0; i < n; ++i) level[i] = i + 1;
    auto emit = [&] {
        DiscreteTree t;
        t.n = n;
        t.root = 0;
        t.parent.assign(n, -1);
        t.children.assign(n, {});
        for (int i = 1; i < n; ++i) {
            for (int j = i - 1; j >= 0; --j) {
                if (level[j] == level[i] - 1) {
                    t.parent[i] = j;
                    t.children[j].push_back(i);
                    break;
                }
            }
        }
        fn(t);
    };
    while (true) {
        emit();
        int p = -1;
        for (int i = n - 1; i >= 0; --i) {
            if (level[i] > 2) {
                p = i;
                break;
            }
        }
        if (p < 0) break;
        int q = p - 1;
        while (level[q] != level[p] - 1) --q;
        for (int i = p; i < n; ++i) level[i] = level[i - (p - q)];
    }
}

std::string canonical_shape(const DiscreteTree& tree) {
    std::vector<std::string> encoded(tree.n);
    for (int v = tree.n - 1; v >= 0; --v) {
        std::vector<std::string> parts;
        parts.reserve(tree.children[v].size());
        for (int c : tree.children[v]) parts.push_back(encoded[c]);
        std::sort(parts.begin(), parts.end());
        std::string out = "(";
        for (const auto& part : parts) out += part;
        out += ")";
        encoded[v] = std::move(out);
    }
    return encoded[tree.root];
}

}  // namespace crtcover
