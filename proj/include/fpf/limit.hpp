#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "fpf/rng.hpp"
#include "fpf/tree_shape.hpp"

namespace fpf {

// Strictly increasing finite set of points in (0,1).
using PointSet = std::vector<double>;

namespace detail {

inline std::atomic<std::uint64_t>& coincident_resample_count() {
    static std::atomic<std::uint64_t> count{0};
    return count;
}

inline PointSet restrict_below(const PointSet& ps, double x) {
    PointSet out;
    for (double p : ps) {
        if (p >= x) break;
        out.push_back(p);
    }
    return out;
}

inline PointSet restrict_above(const PointSet& ps, double x) {
    PointSet out;
    for (double p : ps)
        if (p > x) out.push_back(p);
    return out;
}

inline PointSet merge_sorted(const PointSet& a, const PointSet& b) {
    PointSet out;
    out.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

} // namespace detail

// Unit-intensity Poisson point process on (0,1): Poi(1) points, sorted.
// Coincidences (probability zero in exact arithmetic) are resampled, never
// perturbed, and counted.
inline PointSet sample_ppp(Rng& rng) {
    int n = rng.poisson(1.0);
    PointSet ps(static_cast<std::size_t>(n));
    for (;;) {
        for (auto& p : ps) p = rng.uniform01();
        std::sort(ps.begin(), ps.end());
        if (std::adjacent_find(ps.begin(), ps.end()) == ps.end()) return ps;
        detail::coincident_resample_count()++;
    }
}

// Indexed collection k -> point set, the "abstracted permutation" vertex of
// the limit tree. Levels may be materialized lazily from a seed, so a walk
// of unbounded depth never pre-commits to a window; lazily materialized
// levels are deterministic given (seed, k). Absent levels of a non-lazy
// family are empty configurations.
class PointProcessFamily {
public:
    PointProcessFamily() = default;

    static PointProcessFamily lazy(std::uint64_t seed) {
        PointProcessFamily f;
        f.lazy_seed_ = seed;
        return f;
    }

    static PointProcessFamily from_levels(std::map<int, PointSet> levels) {
        PointProcessFamily f;
        f.levels_ = std::move(levels);
        return f;
    }

    bool is_lazy() const { return lazy_seed_.has_value(); }

    const PointSet& level(int k) const {
        auto it = levels_.find(k);
        if (it != levels_.end()) return it->second;
        if (lazy_seed_) {
            Rng stream = Rng(*lazy_seed_).split(static_cast<std::uint64_t>(static_cast<std::int64_t>(k)));
            return levels_.emplace(k, sample_ppp(stream)).first->second;
        }
        static const PointSet empty;
        return empty;
    }

    void set_level(int k, PointSet ps) { levels_[k] = std::move(ps); }

    void materialize_window(int lo, int hi) {
        for (int k = lo; k <= hi; ++k) (void)level(k);
        lazy_seed_.reset();
    }

    const std::map<int, PointSet>& materialized_levels() const { return levels_; }

    bool has_atom(double p) const {
        for (const auto& [k, ps] : levels_)
            if (std::binary_search(ps.begin(), ps.end(), p)) return true;
        return false;
    }

private:
    mutable std::map<int, PointSet> levels_;
    std::optional<std::uint64_t> lazy_seed_;
};

// Down-shift: xi'_k = xi_{k+1}|[0,x) + xi_k|(x,1] for every k, where x is an
// atom of xi_0. Moves to the child given by bumping x. Operates on the
// materialized window; lazy families should materialize first.
inline PointProcessFamily forward_map(const PointProcessFamily& xi, double x) {
    const auto& zero = xi.level(0);
    if (!std::binary_search(zero.begin(), zero.end(), x))
        throw std::domain_error("forward_map: x is not an atom of level 0");
    std::map<int, PointSet> out;
    for (const auto& [k, ps] : xi.materialized_levels()) {
        (void)ps;
        for (int j : {k - 1, k}) {
            if (out.count(j)) continue;
            out[j] = detail::merge_sorted(detail::restrict_below(xi.level(j + 1), x),
                                          detail::restrict_above(xi.level(j), x));
        }
    }
    // drop empties to keep families compact
    for (auto it = out.begin(); it != out.end();)
        it = it->second.empty() ? out.erase(it) : std::next(it);
    return PointProcessFamily::from_levels(std::move(out));
}

// Up-shift with new atom at u: xi'_0 = xi_{-1}|[0,u) + xi_0|(u,1] + delta_u,
// xi'_k = xi_{k-1}|[0,u) + xi_k|(u,1] for k != 0. Inverse of the forward map.
inline PointProcessFamily backward_map(const PointProcessFamily& xi, double u) {
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("backward_map: u must lie in (0,1)");
    if (xi.has_atom(u)) throw std::domain_error("backward_map: u coincides with an existing atom");
    std::map<int, PointSet> out;
    auto shifted = [&](int k) {
        return detail::merge_sorted(detail::restrict_below(xi.level(k - 1), u),
                                    detail::restrict_above(xi.level(k), u));
    };
    for (const auto& [k, ps] : xi.materialized_levels()) {
        (void)ps;
        for (int j : {k, k + 1})
            if (!out.count(j)) out[j] = shifted(j);
    }
    if (!out.count(0)) out[0] = shifted(0);
    auto& zero = out[0];
    zero.insert(std::lower_bound(zero.begin(), zero.end(), u), u);
    for (auto it = out.begin(); it != out.end();)
        it = it->second.empty() ? out.erase(it) : std::next(it);
    return PointProcessFamily::from_levels(std::move(out));
}

// Point-for-point equality; absent levels compare as empty.
inline bool families_equal(const PointProcessFamily& a, const PointProcessFamily& b) {
    std::vector<int> keys;
    for (const auto& [k, ps] : a.materialized_levels())
        if (!ps.empty()) keys.push_back(k);
    for (const auto& [k, ps] : b.materialized_levels())
        if (!ps.empty()) keys.push_back(k);
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    for (int k : keys)
        if (a.level(k) != b.level(k)) return false;
    return true;
}

namespace detail {

inline void attach_descendants(LabeledTree& t, int node, const PointProcessFamily& fam, int budget,
                               std::optional<double> skip_atom) {
    if (budget <= 0) return;
    for (double x : fam.level(0)) {
        if (skip_atom && x == *skip_atom) continue;
        int child = t.add_node("");
        t.add_edge(node, child);
        attach_descendants(t, child, forward_map(fam, x), budget - 1, std::nullopt);
    }
}

} // namespace detail

// Descendant tree of a family, truncated at depth K: one child per atom of
// the current level-0 configuration, via the forward map.
inline LabeledTree descend_tree(PointProcessFamily xi, int depth) {
    if (xi.is_lazy()) xi.materialize_window(0, std::max(0, depth - 1));
    LabeledTree t;
    int root = t.add_node("");
    detail::attach_descendants(t, root, xi, depth, std::nullopt);
    return t;
}

// The r-ball around the root of the limit tree: spine rho_0..rho_r built by
// the backward map with u_1..u_r, descendants attached by the forward map
// (skipping x = u_i at rho_i, which would recreate rho_{i-1}). Graph
// distance from the root is truncated at r.
inline LabeledTree build_r_ball_limit(const std::vector<double>& u, PointProcessFamily xi, int r) {
    if (r < 0) throw std::invalid_argument("build_r_ball_limit: r must be >= 0");
    if (static_cast<int>(u.size()) < r)
        throw std::invalid_argument("build_r_ball_limit: need at least r spine points");
    if (xi.is_lazy()) xi.materialize_window(-r + 1, r - 1);
    std::vector<PointProcessFamily> spine;
    spine.push_back(std::move(xi));
    for (int i = 1; i <= r; ++i)
        spine.push_back(backward_map(spine.back(), u[static_cast<std::size_t>(i) - 1]));

    LabeledTree t;
    int root = t.add_node("");
    detail::attach_descendants(t, root, spine[0], r, std::nullopt);
    int prev = root;
    for (int i = 1; i <= r; ++i) {
        int node = t.add_node("");
        t.add_edge(prev, node);
        detail::attach_descendants(t, node, spine[static_cast<std::size_t>(i)], r - i,
                                   u[static_cast<std::size_t>(i) - 1]);
        prev = node;
    }
    return t;
}

// Samples the window of independent unit Poisson processes and independent
// uniform spine points, then builds the ball. Distributed as the limit
// tree's r-ball.
inline LabeledTree sample_limit_ball(int r, Rng& rng) {
    std::map<int, PointSet> levels;
    std::vector<double> all_points;
    for (int k = -r + 1; k <= r - 1; ++k) {
        PointSet ps = sample_ppp(rng);
        all_points.insert(all_points.end(), ps.begin(), ps.end());
        levels[k] = std::move(ps);
    }
    std::sort(all_points.begin(), all_points.end());
    auto fresh_point = [&]() {
        for (;;) {
            double p = rng.uniform01();
            if (!std::binary_search(all_points.begin(), all_points.end(), p)) {
                all_points.insert(std::lower_bound(all_points.begin(), all_points.end(), p), p);
                return p;
            }
            detail::coincident_resample_count()++;
        }
    };
    std::vector<double> u(static_cast<std::size_t>(std::max(r, 0)));
    for (auto& ui : u) ui = fresh_point();
    // cross-level coincidences are resampled wholesale (they never occur in
    // practice; the draw above already guarantees u distinct from everything)
    return build_r_ball_limit(u, PointProcessFamily::from_levels(std::move(levels)), r);
}

// Walk to the nearest leaf: bump the rightmost atom of the current level-0
// configuration until it is empty. Each step consumes exactly one fresh
// process level. Distribution Poi(1).
inline long long limit_nearest_leaf(Rng& rng, long long* levels_consumed = nullptr) {
    PointSet cur = sample_ppp(rng);
    long long steps = 0;
    long long consumed = 0;
    while (!cur.empty()) {
        double x = cur.back(); // rightmost; nothing of the old level survives right of it
        PointSet fresh = sample_ppp(rng);
        ++consumed;
        cur = detail::restrict_below(fresh, x);
        ++steps;
    }
    if (levels_consumed) *levels_consumed = consumed;
    return steps;
}

// Walk to the farthest leaf: bump the leftmost atom until none remain.
// Distribution Geo(e^{-1}).
inline long long limit_farthest_leaf(Rng& rng) {
    PointSet cur = sample_ppp(rng);
    long long steps = 0;
    while (!cur.empty()) {
        double x = cur.front();
        PointSet fresh = sample_ppp(rng);
        cur = detail::merge_sorted(detail::restrict_below(fresh, x), detail::restrict_above(cur, x));
        ++steps;
    }
    return steps;
}

// Right-to-left scan construction of the limit bumped set: scan level 0 from
// 1 leftward; after the j-th found point, scan levels 0..j jointly. Returns
// |B|, distributed as the farthest-leaf walk length.
inline long long limit_bumped_scan(Rng& rng) {
    std::vector<PointSet> levels;
    levels.push_back(sample_ppp(rng));
    double pos = 1.0;
    long long count = 0;
    for (;;) {
        double best = -1.0;
        for (const auto& lvl : levels) {
            auto it = std::lower_bound(lvl.begin(), lvl.end(), pos);
            if (it != lvl.begin()) best = std::max(best, *std::prev(it));
        }
        if (best < 0.0) return count;
        pos = best;
        ++count;
        levels.push_back(sample_ppp(rng));
    }
}

// Pure-birth chain, rate k at state k, started at 1, run for duration t.
// Returns the number of jumps; distributed Geo(e^{-t}).
inline long long yule_count(double t, Rng& rng) {
    if (t < 0) throw std::invalid_argument("yule_count: t must be >= 0");
    long long jumps = 0;
    double clock = 0.0;
    double state = 1.0;
    for (;;) {
        clock += rng.exponential(state);
        if (clock > t) return jumps;
        state += 1.0;
        ++jumps;
    }
}

} // namespace fpf
