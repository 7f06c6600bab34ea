#pragma once

#include <algorithm>
#include <string>
#include <vector>

namespace fpf {

// Finite rooted tree with string labels on the vertices. Node 0 is the root.
// Child order carries no meaning; shapes are always compared canonically.
struct LabeledTree {
    struct Node {
        std::string label;
        std::vector<int> children;
    };
    std::vector<Node> nodes;

    int add_node(std::string label) {
        nodes.push_back(Node{std::move(label), {}});
        return static_cast<int>(nodes.size()) - 1;
    }
    void add_edge(int parent, int child) { nodes[static_cast<std::size_t>(parent)].children.push_back(child); }

    int vertex_count() const { return static_cast<int>(nodes.size()); }
    int edge_count() const { return vertex_count() - 1; }
};

// Canonical (order-invariant) encoding of a rooted tree. Two finite rooted
// trees receive equal codes iff they are isomorphic as rooted trees.
struct RootedTreeShape {
    std::string code;
    int vertex_count = 0;
    int depth = 0;

    friend bool operator==(const RootedTreeShape& a, const RootedTreeShape& b) { return a.code == b.code; }
    friend bool operator<(const RootedTreeShape& a, const RootedTreeShape& b) { return a.code < b.code; }
};

namespace detail {
inline std::string ahu_code(const LabeledTree& t, int v, int depth, int& max_depth) {
    max_depth = std::max(max_depth, depth);
    const auto& kids = t.nodes[static_cast<std::size_t>(v)].children;
    if (kids.empty()) return "()";
    std::vector<std::string> codes;
    codes.reserve(kids.size());
    for (int c : kids) codes.push_back(ahu_code(t, c, depth + 1, max_depth));
    std::sort(codes.begin(), codes.end());
    std::string out = "(";
    for (const auto& c : codes) out += c;
    out += ')';
    return out;
}
} // namespace detail

// AHU-style recursive sorted-child encoding.
inline RootedTreeShape canonical_shape(const LabeledTree& tree) {
    RootedTreeShape s;
    int max_depth = 0;
    s.code = detail::ahu_code(tree, 0, 0, max_depth);
    s.vertex_count = tree.vertex_count();
    s.depth = max_depth;
    return s;
}

} // namespace fpf
