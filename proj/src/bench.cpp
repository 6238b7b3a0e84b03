#include "kernsel/bench.hpp"

#include "kernsel/errors.hpp"
#include "kernsel/parallel.hpp"

namespace kernsel {

BenchmarkResult run_benchmark(const BenchmarkConfig& config) {
    if (config.replicates < 1)
        throw InvalidInterval("run_benchmark: need at least one replicate");
    const TuningGrid grid = TuningGrid::dyadic(config.coarse_grid, config.folds);

    BenchmarkResult result;
    result.replicates.resize(static_cast<std::size_t>(config.replicates));

    parallel_for(config.replicates, config.workers, [&](int r) {
        Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(r)));
        SimInstance inst = config.study == Study::One
                               ? generate_study1(config.n, config.p, config.n_valid, rng)
                               : generate_study2(config.n, config.p, config.n_valid, rng);
        CvResult cv = cross_validate(inst.train, grid, config.fit, rng);

        ReplicateOutcome out;
        out.gamma1 = cv.best_gamma1;
        out.gamma2 = cv.best_gamma2;
        out.converged = cv.model.diagnostics.converged;
        out.report = selection_metrics(cv.model.spec.lambda, config.fit.select_threshold,
                                       inst.true_support, config.p);
        out.report.pred_error = prediction_metrics(
            inst.train.task, predict(cv.model, inst.validation.X), inst.validation.y);
        result.replicates[static_cast<std::size_t>(r)] = std::move(out);
    });

    std::vector<SelectionReport> reports;
    reports.reserve(result.replicates.size());
    for (const auto& r : result.replicates) reports.push_back(r.report);
    result.summary = summarize(reports);
    return result;
}

} // namespace kernsel
