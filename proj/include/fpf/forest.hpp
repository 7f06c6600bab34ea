#pragma once

#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "fpf/permutation.hpp"
#include "fpf/tree_shape.hpp"

namespace fpf {

inline std::uint64_t factorial(int n) {
    std::uint64_t f = 1;
    for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
    return f;
}

// Derangement count by inclusion-exclusion: sum_k (-1)^k n!/k!.
inline std::uint64_t derangement_count(int n) {
    long long d = 0;
    long long term = static_cast<long long>(factorial(n));
    for (int k = 0; k <= n; ++k) {
        d += (k % 2 == 0) ? term : -term;
        if (k < n) term /= (k + 1);
    }
    return static_cast<std::uint64_t>(d);
}

// Lehmer-code rank: bijection S_n <-> {0..n!-1}, O(n^2).
inline std::uint64_t lehmer_rank(const Permutation& pi) {
    const auto& v = pi.values();
    int n = pi.size();
    std::uint64_t rank = 0;
    for (int i = 0; i < n; ++i) {
        int smaller = 0;
        for (int j = i + 1; j < n; ++j)
            if (v[static_cast<std::size_t>(j)] < v[static_cast<std::size_t>(i)]) ++smaller;
        rank += static_cast<std::uint64_t>(smaller) * factorial(n - 1 - i);
    }
    return rank;
}

inline Permutation lehmer_unrank(int n, std::uint64_t rank) {
    std::vector<int> pool(static_cast<std::size_t>(n));
    std::iota(pool.begin(), pool.end(), 1);
    std::vector<int> v;
    v.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        std::uint64_t f = factorial(n - 1 - i);
        auto idx = static_cast<std::size_t>(rank / f);
        rank %= f;
        v.push_back(pool[idx]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(idx));
    }
    return Permutation(Permutation::unchecked{}, std::move(v));
}

// Explicit fixed point forest on all of S_n. Vertices are Lehmer ranks;
// parent is the sort_step image, absent exactly at bases (pi(1) = 1).
struct ForestGraph {
    static constexpr std::uint32_t kNoParent = std::numeric_limits<std::uint32_t>::max();

    int n = 0;
    std::vector<std::uint32_t> parent;                // rank -> parent rank or kNoParent
    std::vector<std::vector<std::uint32_t>> children; // inverse of parent

    std::uint64_t vertex_count() const { return parent.size(); }
    std::uint64_t edge_count() const {
        std::uint64_t e = 0;
        for (auto p : parent)
            if (p != kNoParent) ++e;
        return e;
    }
    std::uint64_t base_count() const { return vertex_count() - edge_count(); }
    // Childless non-base vertices; these are exactly the derangements.
    // Childless bases (isolated vertices) are roots, not leaves.
    std::uint64_t leaf_count() const {
        std::uint64_t c = 0;
        for (std::size_t v = 0; v < children.size(); ++v)
            if (children[v].empty() && parent[v] != kNoParent) ++c;
        return c;
    }
};

inline ForestGraph build_forest(int n, int max_n = 9) {
    if (n < 1) throw std::invalid_argument("build_forest: n must be >= 1");
    if (n > max_n)
        throw std::invalid_argument("build_forest: n = " + std::to_string(n) +
                                    " exceeds configured maximum " + std::to_string(max_n));
    ForestGraph g;
    g.n = n;
    auto total = factorial(n);
    g.parent.assign(total, ForestGraph::kNoParent);
    g.children.assign(total, {});
    for (std::uint64_t r = 0; r < total; ++r) {
        Permutation pi = lehmer_unrank(n, r);
        if (pi(1) == 1) continue;
        auto p = static_cast<std::uint32_t>(lehmer_rank(sort_step(pi)));
        g.parent[r] = p;
        g.children[p].push_back(static_cast<std::uint32_t>(r));
    }
    return g;
}

// Breadth-first r-ball around pi, rooted at pi, using sort_step toward the
// base and children toward the leaves. Works for any n with no forest
// precomputation. The ball is the induced subgraph; a base simply has no
// further ancestors. Node labels are compact one-line notations.
inline LabeledTree local_r_ball(const Permutation& pi, int r) {
    if (r < 0) throw std::invalid_argument("local_r_ball: r must be >= 0");
    LabeledTree t;
    t.add_node(pi.to_compact_string());
    // how the BFS predecessor relates to the current vertex
    enum class Pred { none, is_parent, is_child };
    struct Item {
        Permutation perm;
        std::vector<int> pred_values; // set when pred == is_child
        int node;
        int dist;
        Pred pred;
    };
    std::deque<Item> queue;
    queue.push_back(Item{pi, {}, 0, 0, Pred::none});
    while (!queue.empty()) {
        Item cur = std::move(queue.front());
        queue.pop_front();
        if (cur.dist == r) continue;
        // toward the base, unless we arrived from our parent
        if (cur.pred != Pred::is_parent && cur.perm(1) != 1) {
            Permutation parent = sort_step(cur.perm);
            int node = t.add_node(parent.to_compact_string());
            t.add_edge(cur.node, node);
            queue.push_back(Item{std::move(parent), cur.perm.values(), node, cur.dist + 1, Pred::is_child});
        }
        // toward the leaves, skipping the child we arrived from
        for (int i : true_fixed_points(cur.perm)) {
            Permutation child = bump(cur.perm, i);
            if (cur.pred == Pred::is_child && child.values() == cur.pred_values) continue;
            int node = t.add_node(child.to_compact_string());
            t.add_edge(cur.node, node);
            queue.push_back(Item{std::move(child), {}, node, cur.dist + 1, Pred::is_parent});
        }
    }
    return t;
}

// Ball extracted from a prebuilt forest; reference for local_r_ball tests.
inline LabeledTree extract_ball(const ForestGraph& g, std::uint64_t root_rank, int r) {
    LabeledTree t;
    t.add_node(lehmer_unrank(g.n, root_rank).to_compact_string());
    struct Item {
        std::uint64_t rank;
        int node;
        int dist;
        std::uint64_t came_from;
        bool has_origin;
    };
    std::deque<Item> queue;
    queue.push_back(Item{root_rank, 0, 0, 0, false});
    while (!queue.empty()) {
        Item cur = queue.front();
        queue.pop_front();
        if (cur.dist == r) continue;
        std::vector<std::uint64_t> neighbors;
        if (g.parent[cur.rank] != ForestGraph::kNoParent) neighbors.push_back(g.parent[cur.rank]);
        for (auto c : g.children[cur.rank]) neighbors.push_back(c);
        for (auto nb : neighbors) {
            if (cur.has_origin && nb == cur.came_from) continue;
            int node = t.add_node(lehmer_unrank(g.n, nb).to_compact_string());
            t.add_edge(cur.node, node);
            queue.push_back(Item{nb, node, cur.dist + 1, cur.rank, true});
        }
    }
    return t;
}

// Minimum depth of a leaf among the descendants of pi (BFS over children).
// Oracle for the greedy shortest-path algorithm.
inline long long brute_nearest_leaf(const Permutation& pi) {
    std::queue<std::pair<Permutation, long long>> queue;
    queue.push({pi, 0});
    while (!queue.empty()) {
        auto [cur, depth] = std::move(queue.front());
        queue.pop();
        if (is_leaf(cur)) return depth;
        for (int i : true_fixed_points(cur)) queue.push({bump(cur, i), depth + 1});
    }
    throw std::logic_error("brute_nearest_leaf: descendant set has no leaf"); // unreachable
}

struct BudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Maximum leaf depth among descendants (DFS). Guarded by a visited-vertex
// budget; the identity's subtree has depth 2^{n-1}-1.
inline long long brute_farthest_leaf(const Permutation& pi, std::uint64_t node_budget = 10'000'000) {
    std::vector<std::pair<Permutation, long long>> stack;
    stack.emplace_back(pi, 0);
    long long best = 0;
    std::uint64_t visited = 0;
    while (!stack.empty()) {
        auto [cur, depth] = std::move(stack.back());
        stack.pop_back();
        if (++visited > node_budget)
            throw BudgetExceeded("brute_farthest_leaf: node budget exceeded");
        auto tfps = true_fixed_points(cur);
        if (tfps.empty()) best = std::max(best, depth);
        for (int i : tfps) stack.emplace_back(bump(cur, i), depth + 1);
    }
    return best;
}

// DOT output, edges directed child -> parent as in the usual forest pictures.
inline std::string export_dot(const ForestGraph& g) {
    std::string out = "digraph forest {\n";
    auto total = g.vertex_count();
    for (std::uint64_t r = 0; r < total; ++r)
        out += "  \"" + lehmer_unrank(g.n, r).to_compact_string() + "\";\n";
    for (std::uint64_t r = 0; r < total; ++r) {
        if (g.parent[r] == ForestGraph::kNoParent) continue;
        out += "  \"" + lehmer_unrank(g.n, r).to_compact_string() + "\" -> \"" +
               lehmer_unrank(g.n, g.parent[r]).to_compact_string() + "\";\n";
    }
    out += "}\n";
    return out;
}

inline std::string export_dot(const LabeledTree& t) {
    std::string out = "digraph ball {\n";
    for (const auto& node : t.nodes) out += "  \"" + node.label + "\";\n";
    for (std::size_t v = 0; v < t.nodes.size(); ++v)
        for (int c : t.nodes[v].children)
            out += "  \"" + t.nodes[static_cast<std::size_t>(c)].label + "\" -> \"" + t.nodes[v].label + "\";\n";
    out += "}\n";
    return out;
}

// CSV dump with columns (vertex_rank, one_line, parent_rank_or_empty).
inline std::string export_csv(const ForestGraph& g) {
    std::string out = "vertex_rank,one_line,parent_rank_or_empty\n";
    auto total = g.vertex_count();
    for (std::uint64_t r = 0; r < total; ++r) {
        out += std::to_string(r) + "," + lehmer_unrank(g.n, r).to_compact_string() + ",";
        if (g.parent[r] != ForestGraph::kNoParent) out += std::to_string(g.parent[r]);
        out += "\n";
    }
    return out;
}

} // namespace fpf
