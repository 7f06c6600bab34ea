// Command-line front end: every experiment reachable with reproducible seeds
// and machine-readable output (JSON by default, DOT/CSV for graphs).
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fpf/verify.hpp"

using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfigError = 2;

std::uint64_t resolve_seed(CLI::App* cmd, std::uint64_t seed) {
    if (cmd->count("--seed") > 0) return seed;
    if (const char* env = std::getenv("FPF_SEED")) return std::strtoull(env, nullptr, 10);
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) | rd();
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw CLI::ValidationError("--out", "cannot open " + out_path);
    f << text;
}

json pmf_json(const fpf::EmpiricalDistribution& d) {
    json pmf = json::array();
    for (const auto& [v, c] : d.counts)
        pmf.push_back({v, static_cast<double>(c) / static_cast<double>(d.total)});
    return pmf;
}

json moments_json(const fpf::EmpiricalDistribution& d) {
    return json::array({d.moment(1), d.moment(2), d.moment(3), d.moment(4)});
}

json statistic_json(const std::string& name, int n, std::uint64_t trials, std::uint64_t seed,
                    const fpf::EmpiricalDistribution& d, const json& comparisons) {
    json out;
    out["statistic"] = name;
    out["n"] = n;
    out["trials"] = trials;
    out["seed"] = seed;
    out["pmf"] = pmf_json(d);
    out["moments"] = moments_json(d);
    out["comparisons"] = comparisons;
    return out;
}

json comparison_json(const std::string& target, double tv, double bound) {
    json c;
    c["target"] = target;
    c["tv"] = tv;
    if (bound > 0) c["bound"] = bound;
    c["pass"] = bound <= 0 || tv <= bound;
    return c;
}

json header_json(const std::string& subcommand, std::uint64_t seed) {
    json out;
    out["subcommand"] = subcommand;
    out["version"] = fpf::kVersion;
    out["seed"] = seed;
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fixed point forest toolkit"};
    app.require_subcommand(1);

    int n = 5, r = 1;
    std::uint64_t trials = 10000, seed = 0, budget_nodes = 362880, budget_steps = 1ull << 26;
    int workers = 1;
    double x = 2.0, t_arg = 1.0, scale = 1.0;
    bool exhaustive = false, full_paths = false;
    std::string format = "json", out_path, perm_text, statistic = "nearest";
    std::vector<double> xs;
    std::vector<int> a_values = {1};

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed, "master seed (echoed in output)");
        cmd->add_option("--out", out_path, "output file (default stdout)");
    };

    auto* forest_cmd = app.add_subcommand("forest", "build F_n and export it");
    forest_cmd->add_option("--n", n, "permutation size")->required();
    forest_cmd->add_option("--format", format, "json|dot|csv")
        ->check(CLI::IsMember({"json", "dot", "csv"}));
    forest_cmd->add_option("--out", out_path, "output file (default stdout)");
    forest_cmd->add_option("--budget-nodes", budget_nodes, "vertex cap override");

    auto* paths_cmd = app.add_subcommand("paths", "per-permutation path analysis");
    paths_cmd->add_option("--perm", perm_text, "one-line notation, e.g. \"3 2 4 1 5\"")->required();
    paths_cmd->add_option("--x", xs, "x values for the restricted bumped subset");
    paths_cmd->add_flag("--full", full_paths, "include full vertex sequences");
    paths_cmd->add_option("--budget-steps", budget_steps, "longest-path step cap");
    paths_cmd->add_option("--out", out_path, "output file (default stdout)");

    auto* mc_cmd = app.add_subcommand("mc", "Monte Carlo statistics over F_n");
    mc_cmd->add_option("--n", n, "permutation size")->required();
    mc_cmd->add_option("--trials", trials, "number of sampled permutations");
    mc_cmd->add_flag("--exhaustive", exhaustive, "enumerate all of S_n instead of sampling");
    mc_cmd->add_option("--x", xs, "x values for |B_x|");
    mc_cmd->add_option("--workers", workers, "worker threads");
    mc_cmd->add_option("--budget-steps", budget_steps, "longest-path step cap");
    add_common(mc_cmd);

    auto* limit_cmd = app.add_subcommand("limit", "limit tree samplers");
    limit_cmd->add_option("--statistic", statistic, "nearest|farthest|scan|yule|ball")
        ->check(CLI::IsMember({"nearest", "farthest", "scan", "yule", "ball"}));
    limit_cmd->add_option("--r", r, "ball radius (statistic=ball)");
    limit_cmd->add_option("--t", t_arg, "duration (statistic=yule)");
    limit_cmd->add_option("--trials,--samples", trials, "number of samples");
    add_common(limit_cmd);

    auto* compare_cmd = app.add_subcommand("compare", "r-ball histograms: F_n vs limit tree");
    compare_cmd->add_option("--n", n, "permutation size")->required();
    compare_cmd->add_option("--r", r, "ball radius");
    compare_cmd->add_option("--trials", trials, "samples per side");
    add_common(compare_cmd);

    auto* tv_cmd = app.add_subcommand("tv", "exact separation-indicator TV experiment");
    tv_cmd->add_option("--n", n, "permutation size")->required();
    tv_cmd->add_option("--r", r, "conditioning length");
    tv_cmd->add_option("--a", a_values, "conditioning values pi(1..r)");
    tv_cmd->add_option("--out", out_path, "output file (default stdout)");

    auto* verify_cmd = app.add_subcommand("verify", "full acceptance suite");
    verify_cmd->add_option("--scale", scale, "Monte Carlo trial scale factor");
    add_common(verify_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfigError;
    }

    try {
        if (forest_cmd->parsed()) {
            int max_n = 1;
            while (max_n < 20 && fpf::factorial(max_n + 1) <= budget_nodes) ++max_n;
            fpf::ForestGraph g = fpf::build_forest(n, max_n);
            if (format == "dot") {
                emit(fpf::export_dot(g), out_path);
            } else if (format == "csv") {
                emit(fpf::export_csv(g), out_path);
            } else {
                json out = header_json("forest", 0);
                out["n"] = n;
                out["vertices"] = g.vertex_count();
                out["edges"] = g.edge_count();
                out["bases"] = g.base_count();
                out["leaves"] = g.leaf_count();
                emit(out.dump(2), out_path);
            }
            return kExitOk;
        }

        if (paths_cmd->parsed()) {
            fpf::Permutation pi = fpf::Permutation::parse(perm_text);
            fpf::BumpPath sp = fpf::shortest_path(pi);
            fpf::BumpPath lp = fpf::longest_path(pi, budget_steps);
            fpf::BumpedSet b = fpf::bumped_set(pi);
            json out = header_json("paths", 0);
            out["perm"] = pi.to_string();
            out["separation_word"] = fpf::separation_word(pi).entries;
            out["shortest_length"] = sp.length();
            out["longest_length"] = lp.length();
            out["bumped_set"] = b.values;
            out["lub_bound"] = fpf::lub_bound(b);
            json bx = json::array();
            for (double xv : xs.empty() ? std::vector<double>{1.0, 2.0, 4.0} : xs) {
                json row;
                row["x"] = xv;
                row["b_x"] = fpf::b_x_subset(b, xv).values;
                row["simple_upper_bound"] = fpf::simple_upper_bound(b, xv);
                bx.push_back(row);
            }
            out["bx"] = bx;
            out["scan_positions"] = fpf::scan_shortest_positions(pi);
            if (full_paths) {
                json sv = json::array(), lv = json::array();
                for (const auto& v : sp.vertices) sv.push_back(v.to_string());
                for (const auto& v : lp.vertices) lv.push_back(v.to_string());
                out["shortest_vertices"] = sv;
                out["longest_vertices"] = lv;
            }
            emit(out.dump(2), out_path);
            return kExitOk;
        }

        if (mc_cmd->parsed()) {
            seed = resolve_seed(mc_cmd, seed);
            fpf::McOptions opt;
            opt.exhaustive = exhaustive;
            opt.xs = xs;
            opt.workers = workers;
            opt.step_budget = budget_steps;
            fpf::McReport rep = fpf::mc_forest_stats(n, trials, seed, opt);
            double q = std::exp(-1.0);
            json out = header_json("mc", seed);
            out["n"] = n;
            out["trials"] = rep.trials;
            out["statistics"] = json::array();
            out["statistics"].push_back(statistic_json(
                "nearest_leaf", n, rep.trials, seed, rep.nearest,
                json::array({comparison_json(
                    "poisson(1)",
                    fpf::tv_distance(rep.nearest, [](long long j) { return fpf::poisson_pmf(1.0, j); }),
                    0)})));
            out["statistics"].push_back(statistic_json(
                "farthest_leaf", n, rep.trials, seed, rep.farthest,
                json::array({comparison_json(
                    "geometric(1/e)",
                    fpf::tv_distance(rep.farthest,
                                     [q](long long j) { return fpf::geometric_pmf(q, j); }),
                    0)})));
            out["statistics"].push_back(statistic_json(
                "bumped_set_size", n, rep.trials, seed, rep.bumped_size,
                json::array({comparison_json(
                    "geometric(1/e)",
                    fpf::tv_distance(rep.bumped_size,
                                     [q](long long j) { return fpf::geometric_pmf(q, j); }),
                    0)})));
            for (const auto& [xv, dist] : rep.bx_sizes) {
                json s = statistic_json("bx_size", n, rep.trials, seed, dist, json::array());
                s["x"] = xv;
                out["statistics"].push_back(s);
            }
            out["statistics"].push_back(
                statistic_json("base_distance", n, rep.trials, seed, rep.base_distance, json::array()));
            out["identity_tree_probability"] =
                static_cast<double>(rep.identity_tree_count) / static_cast<double>(rep.trials);
            emit(out.dump(2), out_path);
            return kExitOk;
        }

        if (limit_cmd->parsed()) {
            seed = resolve_seed(limit_cmd, seed);
            fpf::Rng rng(seed);
            json out = header_json("limit", seed);
            out["statistic"] = statistic;
            out["trials"] = trials;
            if (statistic == "ball") {
                out["r"] = r;
                std::map<std::string, std::uint64_t> hist;
                for (std::uint64_t i = 0; i < trials; ++i)
                    hist[fpf::canonical_shape(fpf::sample_limit_ball(r, rng)).code]++;
                json h = json::array();
                for (const auto& [code, count] : hist)
                    h.push_back({code, static_cast<double>(count) / static_cast<double>(trials)});
                out["shape_histogram"] = h;
            } else {
                fpf::EmpiricalDistribution d;
                double q = std::exp(-1.0);
                json comparisons = json::array();
                if (statistic == "nearest") {
                    for (std::uint64_t i = 0; i < trials; ++i) d.add(fpf::limit_nearest_leaf(rng));
                    comparisons.push_back(comparison_json(
                        "poisson(1)",
                        fpf::tv_distance(d, [](long long j) { return fpf::poisson_pmf(1.0, j); }), 0));
                } else if (statistic == "farthest") {
                    for (std::uint64_t i = 0; i < trials; ++i) d.add(fpf::limit_farthest_leaf(rng));
                    comparisons.push_back(comparison_json(
                        "geometric(1/e)",
                        fpf::tv_distance(d, [q](long long j) { return fpf::geometric_pmf(q, j); }), 0));
                } else if (statistic == "scan") {
                    for (std::uint64_t i = 0; i < trials; ++i) d.add(fpf::limit_bumped_scan(rng));
                    comparisons.push_back(comparison_json(
                        "geometric(1/e)",
                        fpf::tv_distance(d, [q](long long j) { return fpf::geometric_pmf(q, j); }), 0));
                } else { // yule
                    out["t"] = t_arg;
                    double qt = std::exp(-t_arg);
                    for (std::uint64_t i = 0; i < trials; ++i) d.add(fpf::yule_count(t_arg, rng));
                    comparisons.push_back(comparison_json(
                        "geometric(e^-t)",
                        fpf::tv_distance(d, [qt](long long j) { return fpf::geometric_pmf(qt, j); }),
                        0));
                }
                out["pmf"] = pmf_json(d);
                out["moments"] = moments_json(d);
                out["comparisons"] = comparisons;
            }
            emit(out.dump(2), out_path);
            return kExitOk;
        }

        if (compare_cmd->parsed()) {
            seed = resolve_seed(compare_cmd, seed);
            fpf::RBallComparison cmp = fpf::rball_histogram_compare(n, r, trials, seed);
            json out = header_json("compare", seed);
            out["n"] = n;
            out["r"] = r;
            out["trials"] = trials;
            out["tv"] = cmp.tv;
            out["distinct_finite_shapes"] = cmp.finite_hist.size();
            out["distinct_limit_shapes"] = cmp.limit_hist.size();
            emit(out.dump(2), out_path);
            return kExitOk;
        }

        if (tv_cmd->parsed()) {
            if (tv_cmd->count("--a") == 0 && r != 1) {
                std::cerr << "configuration error: --a must list exactly r values\n";
                return kExitConfigError;
            }
            fpf::IndicatorTvResult res = fpf::indicator_tv_experiment(n, r, a_values);
            json out = header_json("tv", 0);
            out["n"] = n;
            out["r"] = r;
            out["a"] = a_values;
            out["exact_tv"] = res.exact_tv;
            out["bound"] = res.stein_bound;
            out["pass"] = res.exact_tv <= std::min(1.0, res.stein_bound);
            emit(out.dump(2), out_path);
            return res.exact_tv <= std::min(1.0, res.stein_bound) ? kExitOk : kExitCheckFailed;
        }

        if (verify_cmd->parsed()) {
            seed = resolve_seed(verify_cmd, seed);
            fpf::VerifyOptions opt;
            opt.seed = seed;
            opt.scale = scale;
            std::string report = fpf::verify_report_json(opt);
            emit(report, out_path);
            bool ok = report.find("\"all_pass\": true") != std::string::npos;
            return ok ? kExitOk : kExitCheckFailed;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const std::domain_error& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitCheckFailed;
    }
    return kExitConfigError;
}
