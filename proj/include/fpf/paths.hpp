#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "fpf/forest.hpp"
#include "fpf/permutation.hpp"

namespace fpf {

// A bump path from a permutation down to a descendant leaf.
struct BumpPath {
    std::vector<Permutation> vertices;
    std::vector<int> bumped_positions;
    std::vector<int> bumped_values;

    long long length() const { return static_cast<long long>(bumped_positions.size()); }
};

// The set B of values bumped along the unique longest path, ascending.
// Value 1 is never bumped and b_i - i is weakly increasing.
struct BumpedSet {
    std::vector<int> values;

    long long size() const { return static_cast<long long>(values.size()); }
};

namespace detail {

inline int rightmost_true_fixed_point(const std::vector<int>& v) {
    for (int i = static_cast<int>(v.size()); i >= 2; --i)
        if (v[static_cast<std::size_t>(i) - 1] == i) return i;
    return 0;
}

inline int leftmost_true_fixed_point(const std::vector<int>& v) {
    for (int i = 2; i <= static_cast<int>(v.size()); ++i)
        if (v[static_cast<std::size_t>(i) - 1] == i) return i;
    return 0;
}

inline void bump_in_place(std::vector<int>& v, int i) {
    std::rotate(v.begin(), v.begin() + (i - 1), v.begin() + i);
}

} // namespace detail

// Greedy shortest path: bump the rightmost true fixed point until a leaf.
inline BumpPath shortest_path(const Permutation& pi) {
    BumpPath path;
    path.vertices.push_back(pi);
    std::vector<int> v = pi.values();
    for (;;) {
        int i = detail::rightmost_true_fixed_point(v);
        if (i == 0) break;
        path.bumped_positions.push_back(i);
        path.bumped_values.push_back(v[static_cast<std::size_t>(i) - 1]);
        detail::bump_in_place(v, i);
        path.vertices.emplace_back(Permutation::unchecked{}, v);
    }
    return path;
}

inline long long shortest_path_length(const Permutation& pi) {
    std::vector<int> v = pi.values();
    long long len = 0;
    for (;;) {
        int i = detail::rightmost_true_fixed_point(v);
        if (i == 0) return len;
        detail::bump_in_place(v, i);
        ++len;
    }
}

// Right-to-left scan on the separation word: successively select the first
// k = 0, 1, 2, ... moving leftward; a 0 in position 1 may not be selected.
// The letters at the selected positions, bumped in right-to-left selection
// order, realize the greedy shortest path. Positions returned ascending.
inline std::vector<int> scan_shortest_positions(const Permutation& pi) {
    std::vector<int> selected;
    int k = 0;
    for (int i = pi.size(); i >= 1; --i) {
        if (pi(i) - i != k) continue;
        if (k == 0 && i == 1) continue;
        selected.push_back(i);
        ++k;
    }
    std::reverse(selected.begin(), selected.end());
    return selected;
}

// Greedy longest path: bump the leftmost true fixed point until a leaf.
// This is the unique longest path to a descendant leaf.
inline BumpPath longest_path(const Permutation& pi, std::uint64_t step_budget = 1ull << 26) {
    BumpPath path;
    path.vertices.push_back(pi);
    std::vector<int> v = pi.values();
    for (;;) {
        int i = detail::leftmost_true_fixed_point(v);
        if (i == 0) break;
        if (static_cast<std::uint64_t>(path.bumped_positions.size()) >= step_budget)
            throw BudgetExceeded("longest_path: step budget exceeded");
        path.bumped_positions.push_back(i);
        path.bumped_values.push_back(v[static_cast<std::size_t>(i) - 1]);
        detail::bump_in_place(v, i);
        path.vertices.emplace_back(Permutation::unchecked{}, v);
    }
    return path;
}

// Length only; materializes nothing but the current vertex.
inline long long longest_path_length(const Permutation& pi, std::uint64_t step_budget = 1ull << 26) {
    std::vector<int> v = pi.values();
    long long len = 0;
    for (;;) {
        int i = detail::leftmost_true_fixed_point(v);
        if (i == 0) return len;
        if (static_cast<std::uint64_t>(len) >= step_budget)
            throw BudgetExceeded("longest_path_length: step budget exceeded");
        detail::bump_in_place(v, i);
        ++len;
    }
}

// Single right-to-left pass characterization of the bumped set: include
// pi(i) iff pi(i) != 1 and 0 <= pi(i) - i <= #{j > i : pi(j) in B}.
inline BumpedSet bumped_set(const Permutation& pi) {
    BumpedSet b;
    int count_right = 0;
    for (int i = pi.size(); i >= 1; --i) {
        int sep = pi(i) - i;
        if (pi(i) != 1 && 0 <= sep && sep <= count_right) {
            b.values.push_back(pi(i));
            ++count_right;
        }
    }
    std::sort(b.values.begin(), b.values.end());
    return b;
}

// Exact rational with small terms; enough for the exhaustive bound suites.
struct Fraction {
    long long num = 0;
    long long den = 1;

    Fraction() = default;
    Fraction(long long n, long long d) : num(n), den(d) { normalize(); }
    void normalize() {
        if (den < 0) {
            num = -num;
            den = -den;
        }
        long long g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }
    Fraction operator+(const Fraction& o) const { return {num * o.den + o.num * den, den * o.den}; }
    Fraction operator*(const Fraction& o) const { return {num * o.num, den * o.den}; }
    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// 1 + sum_{m=1}^{k-1} prod_{i=1}^{m} (1 + 1/(b_i - i)); equals 2^{n-1}-1 for
// the identity. Degenerate case k = 0 returns 0 so the bound stays above the
// longest-path length at leaves.
inline Fraction lub_bound_exact(const BumpedSet& b) {
    long long k = b.size();
    if (k == 0) return Fraction(0, 1);
    Fraction total(1, 1);
    Fraction product(1, 1);
    for (long long m = 1; m <= k - 1; ++m) {
        long long gap = b.values[static_cast<std::size_t>(m) - 1] - m; // b_m - m >= 1
        product = product * Fraction(gap + 1, gap);
        total = total + product;
    }
    return total;
}

inline double lub_bound(const BumpedSet& b) {
    long long k = b.size();
    if (k == 0) return 0.0;
    double total = 1.0;
    double product = 1.0;
    for (long long m = 1; m <= k - 1; ++m) {
        double gap = static_cast<double>(b.values[static_cast<std::size_t>(m) - 1] - m);
        product *= 1.0 + 1.0 / gap;
        total += product;
    }
    return total;
}

inline double lub_bound(const Permutation& pi) { return lub_bound(bumped_set(pi)); }

// B_x = { b_i in B : b_i - i < x }.
inline BumpedSet b_x_subset(const BumpedSet& b, double x) {
    if (x <= 0) throw std::invalid_argument("b_x_subset: x must be positive");
    BumpedSet out;
    for (std::size_t idx = 0; idx < b.values.size(); ++idx)
        if (static_cast<double>(b.values[idx]) - static_cast<double>(idx + 1) < x)
            out.values.push_back(b.values[idx]);
    return out;
}

inline BumpedSet b_x_subset(const Permutation& pi, double x) { return b_x_subset(bumped_set(pi), x); }

// 2^{|B_x|} |B| (1 + 1/x)^{|B|}; 0 when B is empty.
inline double simple_upper_bound(const BumpedSet& b, double x) {
    if (x <= 0) throw std::invalid_argument("simple_upper_bound: x must be positive");
    long long k = b.size();
    if (k == 0) return 0.0;
    long long kx = b_x_subset(b, x).size();
    return std::exp2(static_cast<double>(kx)) * static_cast<double>(k) *
           std::pow(1.0 + 1.0 / x, static_cast<double>(k));
}

inline double simple_upper_bound(const Permutation& pi, double x) {
    return simple_upper_bound(bumped_set(pi), x);
}

} // namespace fpf
