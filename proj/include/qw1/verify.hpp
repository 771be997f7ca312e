#pragma once

#include <string>
#include <vector>

#include "qw1/bounds.hpp"

namespace qw1 {

struct SuiteOptions {
    uint64_t seed = 1;
    int samples = 50;
    std::vector<int> sizes = {2, 3};
    SolverConfig solver;
    int threads = 0; // 0 = hardware concurrency
};

struct SuiteReport {
    std::vector<CheckResult> results;
    int failures = 0;
};

// suite: "all", "entropy", "transport", or "lattice". Deterministic given
// (suite, options); results ordered by (checker, sample index).
SuiteReport run_suite(const std::string& suite, const SuiteOptions& options);

const std::vector<std::string>& suite_names();

// deterministic per-sample seed derivation
uint64_t mix_seed(uint64_t base, uint64_t index);

} // namespace qw1
