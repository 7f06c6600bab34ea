#include "doctest.h"

#include <set>
#include <string>

#include "fpf/forest.hpp"
#include "fpf/rng.hpp"
#include "fpf/tree_shape.hpp"

using namespace fpf;

namespace {
Permutation P(const std::string& s) { return Permutation::parse(s); }

std::set<std::pair<std::string, std::string>> edge_set(const ForestGraph& g) {
    std::set<std::pair<std::string, std::string>> out;
    for (std::uint64_t r = 0; r < g.vertex_count(); ++r)
        if (g.parent[r] != ForestGraph::kNoParent)
            out.insert({lehmer_unrank(g.n, r).to_compact_string(),
                        lehmer_unrank(g.n, g.parent[r]).to_compact_string()});
    return out;
}
}

TEST_CASE("lehmer rank and unrank are inverse") {
    for (int n = 1; n <= 7; ++n)
        for (std::uint64_t r = 0; r < factorial(n); ++r)
            REQUIRE(lehmer_rank(lehmer_unrank(n, r)) == r);
    CHECK(lehmer_rank(Permutation::identity(5)) == 0);
    CHECK(lehmer_unrank(4, factorial(4) - 1).to_compact_string() == "4321");
}

TEST_CASE("derangement counts by inclusion-exclusion") {
    CHECK(derangement_count(1) == 0);
    CHECK(derangement_count(2) == 1);
    CHECK(derangement_count(3) == 2);
    CHECK(derangement_count(4) == 9);
    CHECK(derangement_count(5) == 44);
    CHECK(derangement_count(6) == 265);
    CHECK(derangement_count(7) == 1854);
}

TEST_CASE("forest for n = 3 has exactly the four known edges") {
    ForestGraph g = build_forest(3);
    CHECK(g.vertex_count() == 6);
    CHECK(edge_set(g) == std::set<std::pair<std::string, std::string>>{
                             {"312", "123"}, {"213", "123"}, {"321", "213"}, {"231", "321"}});
    CHECK(g.base_count() == 2);
    CHECK(g.parent[lehmer_rank(P("1 2 3"))] == ForestGraph::kNoParent);
    CHECK(g.parent[lehmer_rank(P("1 3 2"))] == ForestGraph::kNoParent);
}

TEST_CASE("forest for n = 4") {
    ForestGraph g = build_forest(4);
    CHECK(g.vertex_count() == 24);
    auto edges = edge_set(g);
    CHECK(edges.size() == 18);
    CHECK(edges.count({"4312", "3124"}) == 1);
    CHECK(edges.count({"3124", "1234"}) == 1);
    CHECK(edges.count({"2143", "1243"}) == 1);
}

TEST_CASE("forest for n = 1 is a single isolated vertex") {
    ForestGraph g = build_forest(1);
    CHECK(g.vertex_count() == 1);
    CHECK(g.base_count() == 1);
    CHECK(g.leaf_count() == 0); // an isolated base counts as a root, not a leaf
    CHECK(is_base(Permutation::identity(1)));
    CHECK(is_leaf(Permutation::identity(1)));
}

TEST_CASE("forest counts and acyclicity for n <= 7") {
    for (int n = 1; n <= 7; ++n) {
        ForestGraph g = build_forest(n);
        REQUIRE(g.vertex_count() == factorial(n));
        REQUIRE(g.base_count() == factorial(n - 1));
        REQUIRE(g.leaf_count() == derangement_count(n));
        for (std::uint64_t v = 0; v < g.vertex_count(); ++v) {
            std::uint64_t cur = v, steps = 0;
            while (g.parent[cur] != ForestGraph::kNoParent) {
                cur = g.parent[cur];
                REQUIRE(++steps <= g.vertex_count());
            }
        }
    }
}

TEST_CASE("forest size cap is enforced") {
    CHECK_THROWS_AS(build_forest(10), std::invalid_argument);
    CHECK_THROWS_AS(build_forest(0), std::invalid_argument);
}

TEST_CASE("local r-ball small examples") {
    LabeledTree b0 = local_r_ball(P("1 2 3 4"), 1);
    CHECK(b0.vertex_count() == 4); // identity has no parent, three children
    std::set<std::string> labels;
    for (const auto& node : b0.nodes) labels.insert(node.label);
    CHECK(labels == std::set<std::string>{"1234", "2134", "3124", "4123"});

    LabeledTree b1 = local_r_ball(P("2 3 1"), 1);
    CHECK(b1.vertex_count() == 2); // only the parent 321
    std::set<std::string> l1;
    for (const auto& node : b1.nodes) l1.insert(node.label);
    CHECK(l1 == std::set<std::string>{"231", "321"});

    CHECK(local_r_ball(P("3 2 4 1 5"), 0).vertex_count() == 1);
}

TEST_CASE("local r-ball matches the ball cut out of the full forest, n <= 6, r <= 3") {
    for (int n = 2; n <= 6; ++n) {
        ForestGraph g = build_forest(n);
        for (std::uint64_t rank = 0; rank < g.vertex_count(); ++rank) {
            Permutation pi = lehmer_unrank(n, rank);
            for (int r = 0; r <= 3; ++r) {
                auto direct = canonical_shape(local_r_ball(pi, r));
                auto from_graph = canonical_shape(extract_ball(g, rank, r));
                REQUIRE(direct.code == from_graph.code);
            }
        }
    }
}

TEST_CASE("canonical shape is invariant under child reordering") {
    Rng rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        Permutation pi = random_permutation(6, rng);
        LabeledTree t = local_r_ball(pi, 2);
        auto base = canonical_shape(t);
        LabeledTree shuffled = t;
        for (auto& node : shuffled.nodes) {
            for (std::size_t i = node.children.size(); i > 1; --i)
                std::swap(node.children[i - 1], node.children[rng.below(i)]);
        }
        REQUIRE(canonical_shape(shuffled).code == base.code);
        REQUIRE(canonical_shape(shuffled).vertex_count == base.vertex_count);
        REQUIRE(canonical_shape(shuffled).depth == base.depth);
    }
}

TEST_CASE("distinct 1-ball shapes over S_4") {
    std::set<std::string> codes;
    for (std::uint64_t r = 0; r < factorial(4); ++r)
        codes.insert(canonical_shape(local_r_ball(lehmer_unrank(4, r), 1)).code);
    CHECK(codes.size() == 4);
}

TEST_CASE("rooted path shapes differ by root placement") {
    LabeledTree end;
    int a = end.add_node("a");
    int b = end.add_node("b");
    int c = end.add_node("c");
    end.add_edge(a, b);
    end.add_edge(b, c);
    LabeledTree middle;
    int m = middle.add_node("m");
    middle.add_edge(m, middle.add_node("l"));
    middle.add_edge(m, middle.add_node("r"));
    CHECK(canonical_shape(end).code != canonical_shape(middle).code);

    LabeledTree single;
    single.add_node("s");
    CHECK(canonical_shape(single).vertex_count == 1);
    CHECK(canonical_shape(single).depth == 0);
}

TEST_CASE("brute force oracles on known inputs") {
    CHECK(brute_nearest_leaf(P("3 2 4 1 5")) == 3);
    CHECK(brute_nearest_leaf(P("2 1 4 3")) == 0);
    CHECK(brute_nearest_leaf(P("1 2 3")) == 1);
    CHECK(brute_farthest_leaf(P("3 2 4 1 5")) == 9);
    CHECK(brute_farthest_leaf(P("2 1 4 3")) == 0);
    CHECK(brute_farthest_leaf(Permutation::identity(4)) == 7);
    CHECK_THROWS_AS(brute_farthest_leaf(Permutation::identity(8), 50), BudgetExceeded);
}

TEST_CASE("nearest leaf never beyond farthest leaf") {
    Rng rng(123);
    for (int t = 0; t < 100; ++t) {
        Permutation pi = random_permutation(6, rng);
        REQUIRE(brute_nearest_leaf(pi) <= brute_farthest_leaf(pi));
    }
}

TEST_CASE("dot and csv export") {
    ForestGraph f3 = build_forest(3);
    std::string dot = export_dot(f3);
    CHECK(dot.find("digraph") != std::string::npos);
    CHECK(std::count(dot.begin(), dot.end(), '\n') > 6);
    CHECK(dot.find("231") != std::string::npos);

    std::string dot4 = export_dot(build_forest(4));
    std::size_t arrows = 0;
    for (std::size_t p = dot4.find("->"); p != std::string::npos; p = dot4.find("->", p + 2)) ++arrows;
    CHECK(arrows == 18);

    std::string csv = export_csv(f3);
    CHECK(csv.find("vertex_rank,one_line,parent_rank_or_empty") == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 7); // header + 6 vertices
}
