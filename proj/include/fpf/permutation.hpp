#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fpf/rng.hpp"

namespace fpf {

// One-line notation bijection of {1..n}. Values and positions are 1-indexed
// at every interface; storage is a plain 0-indexed vector.
// Immutable after construction; all operations below return new values.
class Permutation {
public:
    explicit Permutation(std::vector<int> values) : v_(std::move(values)) {
        validate();
    }

    static Permutation identity(int n) {
        std::vector<int> v(static_cast<std::size_t>(n));
        std::iota(v.begin(), v.end(), 1);
        return Permutation(unchecked{}, std::move(v));
    }

    static Permutation random(int n, Rng& rng) {
        if (n < 1) throw std::invalid_argument("permutation size must be >= 1");
        std::vector<int> v(static_cast<std::size_t>(n));
        std::iota(v.begin(), v.end(), 1);
        for (int i = n - 1; i > 0; --i) {
            auto j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
            std::swap(v[static_cast<std::size_t>(i)], v[static_cast<std::size_t>(j)]);
        }
        return Permutation(unchecked{}, std::move(v));
    }

    // Accepts comma- or space-separated one-line notation, e.g. "3 2 4 1 5"
    // or "3,1,4,2". Rejects non-bijections, reporting the first bad position.
    static Permutation parse(const std::string& text) {
        std::string cleaned = text;
        std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
        std::istringstream in(cleaned);
        std::vector<int> v;
        int x;
        while (in >> x) v.push_back(x);
        if (!in.eof()) throw std::invalid_argument("permutation parse error: non-integer token");
        if (v.empty()) throw std::invalid_argument("permutation parse error: empty input");
        int n = static_cast<int>(v.size());
        std::vector<char> seen(static_cast<std::size_t>(n) + 1, 0);
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (v[i] < 1 || v[i] > n)
                throw std::invalid_argument("not a bijection: value " + std::to_string(v[i]) +
                                            " out of range at position " + std::to_string(i + 1));
            if (seen[static_cast<std::size_t>(v[i])])
                throw std::invalid_argument("not a bijection: duplicate value " + std::to_string(v[i]) +
                                            " at position " + std::to_string(i + 1));
            seen[static_cast<std::size_t>(v[i])] = 1;
        }
        return Permutation(unchecked{}, std::move(v));
    }

    int size() const { return static_cast<int>(v_.size()); }

    // 1-indexed: pi(i)
    int operator()(int i) const { return v_[static_cast<std::size_t>(i) - 1]; }

    const std::vector<int>& values() const { return v_; }

    std::string to_string() const {
        std::string out;
        for (std::size_t i = 0; i < v_.size(); ++i) {
            if (i) out += ' ';
            out += std::to_string(v_[i]);
        }
        return out;
    }

    // Digit string like "32415" for n <= 9, spaced otherwise. Used as vertex
    // label in DOT output to match the usual one-line pictures.
    std::string to_compact_string() const {
        if (size() > 9) return to_string();
        std::string out;
        for (int x : v_) out += static_cast<char>('0' + x);
        return out;
    }

    friend bool operator==(const Permutation& a, const Permutation& b) { return a.v_ == b.v_; }
    friend bool operator<(const Permutation& a, const Permutation& b) { return a.v_ < b.v_; }

    struct unchecked {};
    Permutation(unchecked, std::vector<int> values) : v_(std::move(values)) {}

private:
    void validate() const {
        int n = static_cast<int>(v_.size());
        if (n < 1) throw std::invalid_argument("permutation size must be >= 1");
        std::vector<char> seen(static_cast<std::size_t>(n) + 1, 0);
        for (int x : v_) {
            if (x < 1 || x > n || seen[static_cast<std::size_t>(x)])
                throw std::invalid_argument("values are not a bijection of {1..n}");
            seen[static_cast<std::size_t>(x)] = 1;
        }
    }

    std::vector<int> v_;
};

// entries[i] = pi(i) - i, the k-separation of each position.
struct SeparationWord {
    std::vector<int> entries; // entries[i-1] corresponds to position i
};

inline SeparationWord separation_word(const Permutation& pi) {
    SeparationWord w;
    w.entries.reserve(static_cast<std::size_t>(pi.size()));
    for (int i = 1; i <= pi.size(); ++i) w.entries.push_back(pi(i) - i);
    return w;
}

// Positions i with pi(i) = i and i != 1, ascending.
inline std::vector<int> true_fixed_points(const Permutation& pi) {
    std::vector<int> out;
    for (int i = 2; i <= pi.size(); ++i)
        if (pi(i) == i) out.push_back(i);
    return out;
}

inline bool is_derangement(const Permutation& pi) {
    for (int i = 1; i <= pi.size(); ++i)
        if (pi(i) == i) return false;
    return true;
}

// A leaf has no true fixed point. Differs from is_derangement only when
// pi(1) = 1 is the sole fixed point.
inline bool is_leaf(const Permutation& pi) {
    for (int i = 2; i <= pi.size(); ++i)
        if (pi(i) == i) return false;
    return true;
}

inline bool is_base(const Permutation& pi) { return pi(1) == 1; }

// Remove the front value a = pi(1) and reinsert it so it sits at position a.
// The result is the parent of pi in the forest.
inline Permutation sort_step(const Permutation& pi) {
    if (pi(1) == 1) throw std::domain_error("sort_step: permutation is a base (pi(1) = 1)");
    std::vector<int> v = pi.values();
    int a = v[0];
    // value a moves from index 0 to index a-1; everything in between shifts left
    std::rotate(v.begin(), v.begin() + 1, v.begin() + a);
    return Permutation(Permutation::unchecked{}, std::move(v));
}

// Move the value at true fixed point i to the front. Inverse of sort_step.
inline Permutation bump(const Permutation& pi, int i) {
    if (i < 1 || i > pi.size() || pi(i) != i || i == 1)
        throw std::domain_error("bump: position " + std::to_string(i) + " is not a true fixed point");
    std::vector<int> v = pi.values();
    std::rotate(v.begin(), v.begin() + (i - 1), v.begin() + i);
    return Permutation(Permutation::unchecked{}, std::move(v));
}

inline std::vector<Permutation> children(const Permutation& pi) {
    std::vector<Permutation> out;
    for (int i : true_fixed_points(pi)) out.push_back(bump(pi, i));
    return out;
}

// Number of sort steps until pi(1) = 1.
inline long long distance_to_base(const Permutation& pi) {
    std::vector<int> v = pi.values();
    long long steps = 0;
    while (v[0] != 1) {
        int a = v[0];
        std::rotate(v.begin(), v.begin() + 1, v.begin() + a);
        ++steps;
    }
    return steps;
}

inline Permutation base_of(const Permutation& pi) {
    std::vector<int> v = pi.values();
    while (v[0] != 1) {
        int a = v[0];
        std::rotate(v.begin(), v.begin() + 1, v.begin() + a);
    }
    return Permutation(Permutation::unchecked{}, std::move(v));
}

namespace detail {

// Simulate the evaporation of a reduced prefix list and report whether the
// values leave in strictly decreasing order. Entries equal to 0 are tokens:
// they are consumed on their first visit to the front and only shift the
// landing position of later re-insertions. A value v at the front exits when
// v exceeds (values remaining + token count); otherwise it re-inserts at
// position v minus the number of tokens consumed so far. Returns +1 if all
// exits are strictly decreasing, 0 on the first out-of-order exit, and -1 if
// the step budget `cap` is exhausted first. The list is held in a ring
// buffer so front pops are O(1) and re-insertions cost only the shorter
// shift.
inline int evaporates_descending(const std::vector<int>& list, long long cap) {
    const std::size_t cpc = 2 * list.size() + 4;
    std::vector<int> buf(cpc);
    std::size_t head = 0, sz = list.size();
    std::copy(list.begin(), list.end(), buf.begin());
    int remaining = 0;
    for (int x : list)
        if (x != 0) ++remaining;
    const int tokens = static_cast<int>(list.size()) - remaining;
    int consumed = 0;
    int prev_exit = std::numeric_limits<int>::max();
    long long steps = 0;
    auto at = [&](std::size_t i) -> int& {
        std::size_t j = head + i;
        if (j >= cpc) j -= cpc;
        return buf[j];
    };
    while (sz > 0) {
        if (++steps > cap) return -1;
        int x = buf[head];
        if (++head == cpc) head = 0;
        --sz;
        if (x == 0) {
            ++consumed;
            continue;
        }
        if (x > remaining + tokens) {
            if (x > prev_exit) return 0;
            prev_exit = x;
            if (--remaining == 0) break;
        } else {
            std::size_t k = static_cast<std::size_t>(x - consumed - 1);
            if (k <= sz - k) {
                head = head ? head - 1 : cpc - 1;
                for (std::size_t i = 0; i < k; ++i) at(i) = at(i + 1);
            } else {
                for (std::size_t i = sz; i > k; --i) at(i) = at(i - 1);
            }
            at(k) = x;
            ++sz;
        }
    }
    return 1;
}

} // namespace detail

// Tri-state membership test for the identity tree T_n with a step budget:
// +1 member, 0 non-member, -1 undecided within `cap` simulation steps.
// Membership is decided structurally rather than by walking to the base
// (that walk is exponentially long for some permutations): the suffix after
// the value 1 must be increasing (sort steps never disturb it, so it must
// already be sorted), and the prefix before the value 1 must evaporate with
// its values exiting past 1 in strictly decreasing order. Small prefix
// values that can never exit (everything below the first missing value >= 2
// slots into place immediately) are replaced by tokens before simulating.
inline int in_identity_tree_bounded(const Permutation& pi, long long cap) {
    const std::vector<int>& v = pi.values();
    const int n = pi.size();
    int q = 0;
    while (v[q] != 1) ++q;
    for (int i = q + 1; i + 1 < n; ++i)
        if (v[i] > v[i + 1]) return 0;
    if (q == 0) return 1;
    std::vector<char> present(static_cast<std::size_t>(n) + 2, 0);
    for (int i = 0; i < q; ++i) present[v[i]] = 1;
    int gap = 2;
    while (gap <= n && present[gap]) ++gap;
    std::vector<int> prefix(q);
    int values_kept = 0;
    for (int i = 0; i < q; ++i) {
        prefix[i] = v[i] < gap ? 0 : v[i];
        if (prefix[i] != 0) ++values_kept;
    }
    if (values_kept == 0) return 1;
    return detail::evaporates_descending(prefix, cap);
}

// Whether the base of pi is the identity, i.e. pi lies in the tree T_n.
// Exact: escalates the simulation budget until the evaporation resolves
// (it always terminates, but a small fraction of permutations need very
// long simulations; callers that must bound latency can use
// in_identity_tree_bounded directly).
inline bool in_identity_tree(const Permutation& pi) {
    for (long long cap = 1 << 20;; cap *= 8) {
        int r = in_identity_tree_bounded(pi, cap);
        if (r >= 0) return r == 1;
    }
}

inline Permutation random_permutation(int n, Rng& rng) { return Permutation::random(n, rng); }

} // namespace fpf
