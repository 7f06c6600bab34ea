#include "doctest.h"

#include <cmath>
#include <map>
#include <vector>

#include "fpf/limit.hpp"
#include "fpf/stats.hpp"

using namespace fpf;

TEST_CASE("point process sampling: determinism, mean, void probability") {
    Rng a(11), b(11);
    CHECK(sample_ppp(a) == sample_ppp(b));

    Rng rng(3);
    const int trials = 1'000'000;
    long long total = 0, empty = 0;
    for (int t = 0; t < trials; ++t) {
        PointSet ps = sample_ppp(rng);
        total += static_cast<long long>(ps.size());
        empty += ps.empty();
        REQUIRE(std::is_sorted(ps.begin(), ps.end()));
    }
    CHECK(std::abs(static_cast<double>(total) / trials - 1.0) < 0.01);
    CHECK(std::abs(static_cast<double>(empty) / trials - std::exp(-1.0)) < 0.005);
}

TEST_CASE("forward map hand examples") {
    auto xi = PointProcessFamily::from_levels({{0, {0.2, 0.5}}, {1, {0.1, 0.8}}});
    auto out = forward_map(xi, 0.5);
    CHECK(out.level(0) == PointSet{0.1});
    CHECK(out.level(1) == PointSet{0.8});
    CHECK(out.level(-1) == PointSet{0.2}); // the 0.2 of level 0 shifts down a level
    CHECK(out.level(-2).empty());

    auto lone = forward_map(PointProcessFamily::from_levels({{0, {0.4}}}), 0.4);
    CHECK(lone.materialized_levels().empty());

    CHECK_THROWS_AS(forward_map(xi, 0.3), std::domain_error);
}

TEST_CASE("backward map hand examples") {
    auto out = backward_map(PointProcessFamily::from_levels({}), 0.5);
    CHECK(out.level(0) == PointSet{0.5});
    CHECK(out.level(1).empty());
    CHECK(out.level(-1).empty());

    auto xi = PointProcessFamily::from_levels({{0, {0.7}}, {-1, {0.3}}});
    CHECK(backward_map(xi, 0.5).level(0) == PointSet{0.3, 0.5, 0.7});

    CHECK_THROWS_AS(backward_map(xi, 0.7), std::domain_error);
    CHECK_THROWS_AS(backward_map(xi, 1.5), std::domain_error);
}

TEST_CASE("backward map inverts the forward map on random families") {
    Rng rng(21);
    int done = 0;
    while (done < 1000) {
        std::map<int, PointSet> levels;
        for (int k = -2; k <= 2; ++k) levels[k] = sample_ppp(rng);
        if (levels[0].empty()) continue;
        auto xi = PointProcessFamily::from_levels(levels);
        double x = levels[0][rng.below(levels[0].size())];
        REQUIRE(families_equal(backward_map(forward_map(xi, x), x), xi));
        REQUIRE(families_equal(forward_map(backward_map(xi, 0.5 * x), 0.5 * x), xi));
        ++done;
    }
}

TEST_CASE("descendant tree of the four-point configuration") {
    // level-0 atoms at the 1st and 4th point, one level-2 atom at the 2nd,
    // one level-1 atom at the 3rd, reading left to right
    auto xi = PointProcessFamily::from_levels(
        {{0, {0.1, 0.4}}, {2, {0.2}}, {1, {0.3}}});
    LabeledTree t = descend_tree(xi, 3);
    std::map<int, int> level_sizes;
    std::vector<int> depth(static_cast<std::size_t>(t.vertex_count()), 0);
    level_sizes[0] = 1;
    for (int v = 0; v < t.vertex_count(); ++v)
        for (int c : t.nodes[static_cast<std::size_t>(v)].children) {
            depth[static_cast<std::size_t>(c)] = depth[static_cast<std::size_t>(v)] + 1;
            level_sizes[depth[static_cast<std::size_t>(c)]]++;
        }
    CHECK(level_sizes == std::map<int, int>{{0, 1}, {1, 2}, {2, 2}, {3, 2}});

    CHECK(descend_tree(PointProcessFamily::from_levels({}), 3).vertex_count() == 1);
    CHECK(descend_tree(PointProcessFamily::from_levels({{0, {0.5}}}), 3).vertex_count() == 2);
}

TEST_CASE("limit ball structure at tiny configurations") {
    auto empty = PointProcessFamily::from_levels({});
    LabeledTree spine_only = build_r_ball_limit({0.3, 0.6}, empty, 2);
    CHECK(spine_only.vertex_count() == 3);
    auto shape = canonical_shape(spine_only);
    CHECK(shape.depth == 2);

    auto one = PointProcessFamily::from_levels({{0, {0.4}}});
    LabeledTree ball = build_r_ball_limit({0.7}, one, 1);
    CHECK(ball.vertex_count() == 3); // root, one parent, one child

    CHECK(build_r_ball_limit({}, empty, 0).vertex_count() == 1);
}

TEST_CASE("sampled r = 0 ball is a single vertex") {
    Rng rng(31);
    for (int t = 0; t < 10; ++t) CHECK(sample_limit_ball(0, rng).vertex_count() == 1);
}

TEST_CASE("root degree of the 1-ball is 1 + Poi(1)") {
    Rng rng(33);
    EmpiricalDistribution deg;
    const int trials = 100'000;
    for (int t = 0; t < trials; ++t) {
        LabeledTree ball = sample_limit_ball(1, rng);
        deg.add(static_cast<long long>(ball.nodes[0].children.size()));
    }
    double tv = tv_distance(deg, [](long long j) { return j < 1 ? 0.0 : poisson_pmf(1.0, j - 1); });
    CHECK(tv < 0.01);
}

TEST_CASE("ball shapes depend only on relative order of the points") {
    Rng rng(37);
    auto squash = [](double p) { return p * p * (3.0 - 2.0 * p); }; // strictly increasing on (0,1)
    for (int t = 0; t < 200; ++t) {
        std::map<int, PointSet> levels, mapped;
        for (int k = -1; k <= 1; ++k) {
            levels[k] = sample_ppp(rng);
            for (double p : levels[k]) mapped[k].push_back(squash(p));
        }
        std::vector<double> u = {rng.uniform01(), rng.uniform01()};
        std::vector<double> mu = {squash(u[0]), squash(u[1])};
        auto s1 = canonical_shape(build_r_ball_limit(u, PointProcessFamily::from_levels(levels), 2));
        auto s2 = canonical_shape(build_r_ball_limit(mu, PointProcessFamily::from_levels(mapped), 2));
        REQUIRE(s1.code == s2.code);
    }
}

TEST_CASE("window sufficiency: levels outside -r+1..r-1 are irrelevant") {
    Rng rng(41);
    for (int t = 0; t < 100; ++t) {
        const int r = 2;
        std::map<int, PointSet> levels;
        for (int k = -r + 1; k <= r - 1; ++k) levels[k] = sample_ppp(rng);
        std::vector<double> u = {rng.uniform01(), rng.uniform01()};
        auto base = canonical_shape(build_r_ball_limit(u, PointProcessFamily::from_levels(levels), r));
        auto mutated = levels;
        mutated[-r] = sample_ppp(rng);
        mutated[r] = sample_ppp(rng);
        mutated[r + 5] = {0.123, 0.456};
        auto other =
            canonical_shape(build_r_ball_limit(u, PointProcessFamily::from_levels(mutated), r));
        REQUIRE(base.code == other.code);
    }
}

TEST_CASE("lazy families materialize deterministically by (seed, level)") {
    auto a = PointProcessFamily::lazy(77);
    auto b = PointProcessFamily::lazy(77);
    CHECK(a.level(-3) == b.level(-3));
    CHECK(a.level(0) == b.level(0));
    CHECK(a.level(5) == b.level(5));
    auto c = PointProcessFamily::lazy(78);
    bool all_same = a.level(0) == c.level(0) && a.level(1) == c.level(1) && a.level(2) == c.level(2);
    CHECK_FALSE(all_same);
}

TEST_CASE("nearest-leaf walk consumes one level per step") {
    Rng rng(51);
    for (int t = 0; t < 1000; ++t) {
        long long consumed = 0;
        long long m = limit_nearest_leaf(rng, &consumed);
        REQUIRE(consumed == m);
    }
}

TEST_CASE("limit walk distributions") {
    const int trials = 200'000;
    double q = std::exp(-1.0);

    EmpiricalDistribution nearest;
    Rng r1(61);
    for (int t = 0; t < trials; ++t) nearest.add(limit_nearest_leaf(r1));
    CHECK(tv_distance(nearest, [](long long j) { return poisson_pmf(1.0, j); }) < 0.01);

    EmpiricalDistribution farthest;
    Rng r2(62);
    for (int t = 0; t < trials; ++t) farthest.add(limit_farthest_leaf(r2));
    CHECK(tv_distance(farthest, [q](long long j) { return geometric_pmf(q, j); }) < 0.01);
    CHECK(std::abs(farthest.mean() - (std::exp(1.0) - 1.0)) < 0.01);

    EmpiricalDistribution scan;
    Rng r3(63);
    for (int t = 0; t < trials; ++t) scan.add(limit_bumped_scan(r3));
    CHECK(tv_distance(scan, [q](long long j) { return geometric_pmf(q, j); }) < 0.01);
    CHECK(tv_distance(scan, farthest) < 0.01);
}

TEST_CASE("yule process") {
    Rng rng(71);
    CHECK(yule_count(0.0, rng) == 0);
    CHECK_THROWS_AS(yule_count(-1.0, rng), std::invalid_argument);

    EmpiricalDistribution y;
    const int trials = 200'000;
    for (int t = 0; t < trials; ++t) y.add(yule_count(1.0, rng));
    double q = std::exp(-1.0);
    CHECK(tv_distance(y, [q](long long j) { return geometric_pmf(q, j); }) < 0.01);
    CHECK(std::abs(y.mean() - (std::exp(1.0) - 1.0)) < 0.01);
}
