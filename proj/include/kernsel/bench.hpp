#pragma once

#include <cstdint>
#include <vector>

#include "kernsel/metrics.hpp"
#include "kernsel/simdata.hpp"
#include "kernsel/tuning.hpp"

namespace kernsel {

// One full simulation experiment: per replicate, generate an instance,
// cross-validate (gamma1, gamma2), refit, and score selection plus held-out
// prediction.
struct BenchmarkConfig {
    Study study = Study::One;
    int n = 200;
    int p = 100;
    int n_valid = 2000;
    int replicates = 25;
    std::uint64_t seed = 1;
    bool coarse_grid = true;
    int folds = 3;
    int workers = 1;
    FitConfig fit; // gamma1/gamma2 are overwritten by the per-replicate CV
};

struct ReplicateOutcome {
    SelectionReport report;
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    bool converged = true;
};

struct BenchmarkResult {
    std::vector<ReplicateOutcome> replicates;
    BenchmarkSummary summary;
};

// Replicate r runs on its own generator seeded with derive_seed(seed, r)
// and results merge by index, so the outcome is independent of the worker
// count.
BenchmarkResult run_benchmark(const BenchmarkConfig& config);

} // namespace kernsel
