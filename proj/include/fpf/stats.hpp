#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "fpf/forest.hpp"
#include "fpf/limit.hpp"
#include "fpf/paths.hpp"
#include "fpf/permutation.hpp"
#include "fpf/rng.hpp"

namespace fpf {

// Finite pmf over integers with sample count.
struct EmpiricalDistribution {
    std::string label;
    std::uint64_t seed = 0;
    std::map<long long, std::uint64_t> counts;
    std::uint64_t total = 0;

    void add(long long value, std::uint64_t weight = 1) {
        counts[value] += weight;
        total += weight;
    }
    void merge(const EmpiricalDistribution& other) {
        for (const auto& [v, c] : other.counts) counts[v] += c;
        total += other.total;
    }
    double pmf(long long value) const {
        auto it = counts.find(value);
        return it == counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(total);
    }
    long long max_value() const { return counts.empty() ? 0 : counts.rbegin()->first; }
    std::uint64_t tail_count(long long k) const {
        std::uint64_t c = 0;
        for (auto it = counts.lower_bound(k); it != counts.end(); ++it) c += it->second;
        return c;
    }
    double tail_prob(long long k) const {
        return total == 0 ? 0.0 : static_cast<double>(tail_count(k)) / static_cast<double>(total);
    }
    double moment(int p) const {
        double m = 0.0;
        for (const auto& [v, c] : counts)
            m += std::pow(static_cast<double>(v), p) * static_cast<double>(c);
        return m / static_cast<double>(total);
    }
    double mean() const { return moment(1); }
};

inline double poisson_pmf(double lambda, long long j) {
    if (lambda <= 0 || j < 0) throw std::domain_error("poisson_pmf: need lambda > 0 and j >= 0");
    return std::exp(-lambda + static_cast<double>(j) * std::log(lambda) -
                    std::lgamma(static_cast<double>(j) + 1.0));
}

inline double geometric_pmf(double q, long long j) {
    if (!(q > 0 && q <= 1) || j < 0) throw std::domain_error("geometric_pmf: need 0 < q <= 1 and j >= 0");
    return std::pow(1.0 - q, static_cast<double>(j)) * q;
}

// Closed-form moments of Geo(q) on {0,1,...}: mean (1-q)/q, second moment
// (1-q)(2-q)/q^2.
inline double geometric_mean(double q) { return (1.0 - q) / q; }
inline double geometric_second_moment(double q) { return (1.0 - q) * (2.0 - q) / (q * q); }

// Half L1 distance between two empirical pmfs over their joint support.
inline double tv_distance(const EmpiricalDistribution& p, const EmpiricalDistribution& q) {
    double sum = 0.0;
    auto it = p.counts.begin();
    auto jt = q.counts.begin();
    while (it != p.counts.end() || jt != q.counts.end()) {
        if (jt == q.counts.end() || (it != p.counts.end() && it->first < jt->first)) {
            sum += static_cast<double>(it->second) / static_cast<double>(p.total);
            ++it;
        } else if (it == p.counts.end() || jt->first < it->first) {
            sum += static_cast<double>(jt->second) / static_cast<double>(q.total);
            ++jt;
        } else {
            sum += std::abs(static_cast<double>(it->second) / static_cast<double>(p.total) -
                            static_cast<double>(jt->second) / static_cast<double>(q.total));
            ++it;
            ++jt;
        }
    }
    return 0.5 * sum;
}

// Empirical vs theoretical pmf: truncate at max observed value + 64 and add
// the analytic tail as residual mass. The tail remainder must be negligible.
inline double tv_distance(const EmpiricalDistribution& p, const std::function<double(long long)>& pmf) {
    long long jmax = p.max_value() + 64;
    double sum = 0.0;
    double theoretical_mass = 0.0;
    for (long long j = 0; j <= jmax; ++j) {
        double qj = pmf(j);
        theoretical_mass += qj;
        sum += std::abs(p.pmf(j) - qj);
    }
    double tail = 1.0 - theoretical_mass;
    if (tail > 1e-12) throw std::runtime_error("tv_distance: theoretical tail mass above 1e-12");
    return 0.5 * (sum + std::max(tail, 0.0));
}

// Exact TV between two theoretical pmfs, summed to a far tail.
inline double tv_between_pmfs(const std::function<double(long long)>& p,
                              const std::function<double(long long)>& q, long long jmax = 256) {
    double sum = 0.0;
    for (long long j = 0; j <= jmax; ++j) sum += std::abs(p(j) - q(j));
    return 0.5 * sum;
}

// Sum of |a_i - b_i|: the TV bound between vectors of independent Poisson
// variables with those means.
inline double poisson_vector_tv_bound(const std::vector<double>& means_a,
                                      const std::vector<double>& means_b) {
    if (means_a.size() != means_b.size())
        throw std::invalid_argument("poisson_vector_tv_bound: index sets differ");
    double sum = 0.0;
    for (std::size_t i = 0; i < means_a.size(); ++i) sum += std::abs(means_a[i] - means_b[i]);
    return sum;
}

// ---------------------------------------------------------------------------
// Monte Carlo over F_n

struct McOptions {
    bool exhaustive = false; // enumerate all of S_n with weight 1 instead of sampling
    std::vector<double> xs;  // x values for |B_x|
    bool with_nearest = true;
    bool with_farthest = true;
    bool with_bumped = true;
    bool with_base_distance = true;
    bool with_identity_tree = true;
    std::uint64_t step_budget = 1ull << 26;
    int workers = 1;
};

struct McReport {
    int n = 0;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    EmpiricalDistribution nearest;       // M_n
    EmpiricalDistribution farthest;      // L_n
    EmpiricalDistribution bumped_size;   // |B|
    std::vector<std::pair<double, EmpiricalDistribution>> bx_sizes; // |B_x|
    EmpiricalDistribution base_distance; // R_n
    std::uint64_t identity_tree_count = 0;

    void merge(const McReport& o) {
        trials += o.trials;
        nearest.merge(o.nearest);
        farthest.merge(o.farthest);
        bumped_size.merge(o.bumped_size);
        for (std::size_t i = 0; i < bx_sizes.size(); ++i) bx_sizes[i].second.merge(o.bx_sizes[i].second);
        base_distance.merge(o.base_distance);
        identity_tree_count += o.identity_tree_count;
    }
};

namespace detail {

inline void mc_accumulate(McReport& rep, const Permutation& pi, const McOptions& opt) {
    if (opt.with_nearest) rep.nearest.add(shortest_path_length(pi));
    if (opt.with_farthest) rep.farthest.add(longest_path_length(pi, opt.step_budget));
    if (opt.with_bumped || !opt.xs.empty()) {
        BumpedSet b = bumped_set(pi);
        if (opt.with_bumped) rep.bumped_size.add(b.size());
        for (std::size_t i = 0; i < opt.xs.size(); ++i)
            rep.bx_sizes[i].second.add(b_x_subset(b, opt.xs[i]).size());
    }
    if (opt.with_base_distance) {
        // The walk to the base can be exponentially long (R_n has a heavy
        // tail), so guard it with the same budget discipline as the paths.
        std::vector<int> v = pi.values();
        long long steps = 0;
        while (v[0] != 1) {
            if (static_cast<std::uint64_t>(steps) >= opt.step_budget)
                throw BudgetExceeded("mc_forest_stats: base-distance step budget exceeded");
            std::rotate(v.begin(), v.begin() + 1, v.begin() + v[0]);
            ++steps;
        }
        rep.base_distance.add(steps);
    }
    if (opt.with_identity_tree && in_identity_tree(pi)) ++rep.identity_tree_count;
}

inline McReport mc_empty_report(int n, std::uint64_t seed, const McOptions& opt) {
    McReport rep;
    rep.n = n;
    rep.seed = seed;
    for (double x : opt.xs) rep.bx_sizes.emplace_back(x, EmpiricalDistribution{});
    return rep;
}

} // namespace detail

// Samples uniform permutations (or enumerates S_n exhaustively) and
// aggregates the path/forest statistics. Workers split the trials into
// fixed chunks with derived seeds; merging is order-independent.
inline McReport mc_forest_stats(int n, std::uint64_t trials, std::uint64_t seed, McOptions opt = {}) {
    if (n < 1) throw std::invalid_argument("mc_forest_stats: n must be >= 1");
    McReport rep = detail::mc_empty_report(n, seed, opt);
    if (opt.exhaustive) {
        std::uint64_t total = factorial(n);
        rep.trials = total;
        for (std::uint64_t r = 0; r < total; ++r)
            detail::mc_accumulate(rep, lehmer_unrank(n, r), opt);
        return rep;
    }
    if (trials < 1) throw std::invalid_argument("mc_forest_stats: trials must be >= 1");
    int workers = std::max(1, opt.workers);
    if (workers == 1) {
        Rng rng = Rng(seed).split(0);
        rep.trials = trials;
        for (std::uint64_t t = 0; t < trials; ++t)
            detail::mc_accumulate(rep, random_permutation(n, rng), opt);
        return rep;
    }
    std::vector<McReport> parts;
    parts.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) parts.push_back(detail::mc_empty_report(n, seed, opt));
    std::vector<std::thread> threads;
    for (int w = 0; w < workers; ++w) {
        std::uint64_t lo = trials * static_cast<std::uint64_t>(w) / static_cast<std::uint64_t>(workers);
        std::uint64_t hi = trials * (static_cast<std::uint64_t>(w) + 1) / static_cast<std::uint64_t>(workers);
        threads.emplace_back([&, w, lo, hi]() {
            Rng rng = Rng(seed).split(static_cast<std::uint64_t>(w));
            parts[static_cast<std::size_t>(w)].trials = hi - lo;
            for (std::uint64_t t = lo; t < hi; ++t)
                detail::mc_accumulate(parts[static_cast<std::size_t>(w)], random_permutation(n, rng), opt);
        });
    }
    for (auto& th : threads) th.join();
    for (const auto& part : parts) rep.merge(part);
    return rep;
}

// ---------------------------------------------------------------------------
// r-ball comparison between F_n and the limit tree

struct RBallComparison {
    double tv = 0.0;
    std::map<std::string, std::uint64_t> finite_hist;
    std::map<std::string, std::uint64_t> limit_hist;
    std::uint64_t trials = 0;
};

inline RBallComparison rball_histogram_compare(int n, int r, std::uint64_t trials, std::uint64_t seed) {
    RBallComparison cmp;
    cmp.trials = trials;
    Rng finite_rng = Rng(seed).split(1);
    Rng limit_rng = Rng(seed).split(2);
    for (std::uint64_t t = 0; t < trials; ++t) {
        Permutation pi = random_permutation(n, finite_rng);
        cmp.finite_hist[canonical_shape(local_r_ball(pi, r)).code]++;
        cmp.limit_hist[canonical_shape(sample_limit_ball(r, limit_rng)).code]++;
    }
    double sum = 0.0;
    auto probability = [trials](const std::map<std::string, std::uint64_t>& h, const std::string& key) {
        auto it = h.find(key);
        return it == h.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(trials);
    };
    std::vector<std::string> keys;
    for (const auto& [k, c] : cmp.finite_hist) keys.push_back(k);
    for (const auto& [k, c] : cmp.limit_hist) keys.push_back(k);
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    for (const auto& k : keys)
        sum += std::abs(probability(cmp.finite_hist, k) - probability(cmp.limit_hist, k));
    cmp.tv = 0.5 * sum;
    return cmp;
}

// ---------------------------------------------------------------------------
// Exact separation-indicator law and its distance to independent Poissons

// Law of the active-indicator configuration over the index set
// I = {(i,k) : |k| <= r-1, i > r, 1 <= i+k <= n}, under a uniform
// permutation conditioned on pi(1)=a_1,...,pi(r)=a_r. Probabilities are
// exact rationals count/(n-r)!.
struct IndicatorLaw {
    int n = 0;
    int r = 0;
    std::vector<int> conditioning;
    std::uint64_t denominator = 0; // (n-r)!
    std::size_t index_set_size = 0;
    std::map<std::vector<std::pair<int, int>>, std::uint64_t> support; // active set -> count
};

inline IndicatorLaw indicator_law_exact(int n, int r, const std::vector<int>& a,
                                        std::uint64_t enumeration_budget = 40320) {
    if (r < 1 || r >= n) throw std::invalid_argument("indicator_law_exact: need 1 <= r < n");
    if (static_cast<int>(a.size()) != r)
        throw std::invalid_argument("indicator_law_exact: conditioning length must equal r");
    if (factorial(n - r) > enumeration_budget)
        throw BudgetExceeded("indicator_law_exact: (n-r)! exceeds enumeration budget");
    IndicatorLaw law;
    law.n = n;
    law.r = r;
    law.conditioning = a;
    law.denominator = factorial(n - r);
    for (int k = -r + 1; k <= r - 1; ++k)
        for (int i = r + 1; i <= n; ++i)
            if (i + k >= 1 && i + k <= n) ++law.index_set_size;

    std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
    for (int v : a) {
        if (v < 1 || v > n || used[static_cast<std::size_t>(v)])
            throw std::invalid_argument("indicator_law_exact: conditioning values must be distinct in [1,n]");
        used[static_cast<std::size_t>(v)] = 1;
    }
    std::vector<int> rest;
    for (int v = 1; v <= n; ++v)
        if (!used[static_cast<std::size_t>(v)]) rest.push_back(v);
    std::sort(rest.begin(), rest.end());
    do {
        std::vector<std::pair<int, int>> active;
        for (int i = r + 1; i <= n; ++i) {
            int k = rest[static_cast<std::size_t>(i - r) - 1] - i;
            if (k >= -r + 1 && k <= r - 1) active.emplace_back(i, k);
        }
        law.support[active]++;
    } while (std::next_permutation(rest.begin(), rest.end()));
    return law;
}

struct IndicatorTvResult {
    double exact_tv = 0.0;
    double stein_bound = 0.0; // (16r^2 + 2r)/(n - r - 1)
};

// Exact TV between the indicator law and independent Poi(1/n) coordinates
// over the same index set. A 0/1 configuration with active set s has product
// probability e^{-|I|/n} n^{-|s|}; mass on configurations never produced by
// a permutation is handled by complementary summation.
inline IndicatorTvResult indicator_tv_experiment(int n, int r, const std::vector<int>& a,
                                                 std::uint64_t enumeration_budget = 40320) {
    IndicatorLaw law = indicator_law_exact(n, r, a, enumeration_budget);
    double log_base = -static_cast<double>(law.index_set_size) / static_cast<double>(n);
    double sum = 0.0;
    double product_mass_seen = 0.0;
    for (const auto& [active, count] : law.support) {
        double p_law = static_cast<double>(count) / static_cast<double>(law.denominator);
        double p_product =
            std::exp(log_base - static_cast<double>(active.size()) * std::log(static_cast<double>(n)));
        sum += std::abs(p_law - p_product);
        product_mass_seen += p_product;
    }
    IndicatorTvResult out;
    out.exact_tv = 0.5 * (sum + (1.0 - product_mass_seen));
    out.stein_bound = static_cast<double>(16 * r * r + 2 * r) / static_cast<double>(n - r - 1);
    return out;
}

// ---------------------------------------------------------------------------
// Tail checks

// True iff empirical P[X >= k] <= c^k for every k in [1, kmax] where the
// tail estimate rests on at least min_support samples.
inline bool tail_decay_check(const EmpiricalDistribution& samples, double c, long long kmax = 12,
                             std::uint64_t min_support = 100) {
    if (!(c > 0 && c < 1)) throw std::invalid_argument("tail_decay_check: need 0 < c < 1");
    for (long long k = 1; k <= kmax; ++k) {
        std::uint64_t tail = samples.tail_count(k);
        if (tail < min_support) continue;
        double emp = static_cast<double>(tail) / static_cast<double>(samples.total);
        if (emp > std::pow(c, static_cast<double>(k))) return false;
    }
    return true;
}

struct BxTailRow {
    long long t = 0;
    double empirical = 0.0;
    double bound = 0.0; // (e x / t)^t
    double sigma = 0.0; // binomial std error of the empirical tail
    bool pass = false;
};

// Empirical P[|B_x| >= t] against the (ex/t)^t bound, with 3-sigma Monte
// Carlo slack. Bounds above 1 pass automatically.
inline std::vector<BxTailRow> bx_tail_check(const EmpiricalDistribution& bx_samples, double x,
                                            long long t_lo, long long t_hi) {
    if (x <= 0) throw std::invalid_argument("bx_tail_check: x must be positive");
    std::vector<BxTailRow> rows;
    for (long long t = t_lo; t <= t_hi; ++t) {
        BxTailRow row;
        row.t = t;
        row.empirical = bx_samples.tail_prob(t);
        row.bound = std::pow(std::exp(1.0) * x / static_cast<double>(t), static_cast<double>(t));
        row.sigma = std::sqrt(row.empirical * (1.0 - row.empirical) /
                              static_cast<double>(bx_samples.total));
        row.pass = row.bound >= 1.0 || row.empirical <= row.bound + 3.0 * row.sigma;
        rows.push_back(row);
    }
    return rows;
}

struct IdentityTreeProbe {
    int n = 0;
    std::uint64_t trials = 0;
    std::uint64_t hits = 0;       // confirmed members
    std::uint64_t undecided = 0;  // trials whose membership test hit the step budget
    double p_hat = 0.0;           // hits / trials: lower estimate
    double p_hat_high = 0.0;      // (hits + undecided) / trials: upper estimate
    double sigma = 0.0;           // binomial sigma at the upper estimate (conservative)
};

// Empirical P[pi_n is in the identity-based tree]. A tiny fraction of
// sampled permutations need extremely long evaporation simulations to
// settle membership; those are left undecided after `step_cap` steps and
// reported separately, so [p_hat, p_hat_high] brackets the estimate that
// exact resolution would produce on the same sample.
inline IdentityTreeProbe identity_tree_probe(int n, std::uint64_t trials, std::uint64_t seed,
                                             long long step_cap = 1 << 20) {
    Rng rng = Rng(seed).split(0);
    IdentityTreeProbe probe;
    probe.n = n;
    probe.trials = trials;
    for (std::uint64_t t = 0; t < trials; ++t) {
        int r = in_identity_tree_bounded(random_permutation(n, rng), step_cap);
        if (r == 1) ++probe.hits;
        else if (r < 0) ++probe.undecided;
    }
    probe.p_hat = static_cast<double>(probe.hits) / static_cast<double>(trials);
    probe.p_hat_high =
        static_cast<double>(probe.hits + probe.undecided) / static_cast<double>(trials);
    probe.sigma =
        std::sqrt(probe.p_hat_high * (1.0 - probe.p_hat_high) / static_cast<double>(trials));
    return probe;
}

} // namespace fpf
