#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "natset/budget.hpp"
#include "natset/sets.hpp"

namespace natset {

// #{j : j! < below}, counting indices, so the repeated value 0! = 1! = 1
// contributes twice. This is the count that bounds sparse-subset images.
nat factorial_index_count(nat below);

struct IdentityCheck {
    std::string name;
    nat runs = 0;
    std::vector<std::string> violations;  // minimized witnesses
};

struct SuiteResult {
    std::string suite;
    nat trials = 0;
    nat prefix_n = 0;
    std::uint64_t seed = 0;
    std::vector<IdentityCheck> checks;

    bool passed() const;
    nat violation_count() const;
};

// suite is one of "core", "weakening", "partition", "permutation". Runs
// every exact identity of the suite on `trials` seeded Bernoulli(1/2) sets
// compared on prefixes below prefix_n.
SuiteResult run_identity_suite(const std::string& suite, nat trials,
                               std::uint64_t seed, nat prefix_n, Budget b = {});

const std::vector<std::string>& identity_suite_names();

} // namespace natset
