// Randomised property suites; runnable on their own or through ctest.

#include <CLI11.hpp>

#include <cstdio>
#include <functional>
#include <map>

#include "oracles.hpp"
#include "symsq/error.hpp"

int main(int argc, char** argv) {
    CLI::App app{"randomised property suites"};
    long cases = 1000;
    std::uint64_t seed = 20261019;
    std::vector<std::string> only;
    app.add_option("--cases", cases, "cases per suite")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "base seed");
    app.add_option("--suite", only, "hecke, gauss, bernoulli, ball, hensel (default: all)");
    CLI11_PARSE(app, argc, argv);

    using Suite = std::function<oracle::PropertyResult(std::uint64_t, long)>;
    const std::vector<std::pair<std::string, Suite>> suites{
        {"hecke", oracle::property_hecke},
        {"gauss", oracle::property_gauss_norm},
        {"bernoulli", oracle::property_bernoulli_parity},
        {"ball", oracle::property_ball_containment},
        {"hensel", oracle::property_hensel},
    };
    int bad = 0;
    for (size_t i = 0; i < suites.size(); ++i) {
        const auto& [key, run] = suites[i];
        if (!only.empty() && std::find(only.begin(), only.end(), key) == only.end()) continue;
        oracle::PropertyResult r;
        try {
            r = run(seed + i, cases);
        } catch (const symsq::Error& e) {
            std::printf("%-28s error: %s\n", key.c_str(), e.what());
            ++bad;
            continue;
        }
        std::printf("%-28s %6ld cases  %4ld failures  %7.2fs\n", r.name.c_str(), r.cases, r.failures, r.seconds);
        if (r.failures) {
            std::printf("    first failure: %s\n", r.first_failure.c_str());
            ++bad;
        }
    }
    return bad ? 1 : 0;
}
