// Full acceptance suite: prints one pass/fail line per criterion and exits
// nonzero if any criterion fails. Trial counts scale with --scale for quick
// smoke runs; thresholds never change.
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

#include "fpf/verify.hpp"

int main(int argc, char** argv) {
    fpf::VerifyOptions opt;
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        auto value = [&](const char* flag) -> const char* {
            if (i + 1 >= argc) {
                std::fprintf(stderr, "missing value for %s\n", flag);
                std::exit(2);
            }
            return argv[++i];
        };
        if (arg == "--seed") {
            opt.seed = std::strtoull(value("--seed"), nullptr, 10);
        } else if (arg == "--scale") {
            opt.scale = std::strtod(value("--scale"), nullptr);
        } else {
            std::fprintf(stderr, "usage: %s [--seed N] [--scale F]\n", argv[0]);
            return 2;
        }
    }

    auto results = fpf::run_acceptance(opt);
    bool all_pass = true;
    for (const auto& r : results) {
        std::printf("[%s] criterion %2d: %s (%s)\n", r.pass ? "PASS" : "FAIL", r.id,
                    r.name.c_str(), r.detail.c_str());
        std::fflush(stdout);
        all_pass = all_pass && r.pass;
    }
    std::printf("%s\n", all_pass ? "ALL CRITERIA PASSED" : "SOME CRITERIA FAILED");
    return all_pass ? 0 : 1;
}
