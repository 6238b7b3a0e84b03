#include "kernsel/cli.hpp"

#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "kernsel/bench.hpp"
#include "kernsel/errors.hpp"
#include "kernsel/io.hpp"
#include "kernsel/metrics.hpp"
#include "kernsel/parallel.hpp"
#include "kernsel/simdata.hpp"
#include "kernsel/solver.hpp"
#include "kernsel/tuning.hpp"

namespace kernsel::cli {

namespace {

namespace fs = std::filesystem;

std::string real_str(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

Task parse_task(const std::string& name) {
    return name == "regression" ? Task::Regression : Task::Classification;
}

void write_truth_file(const std::string& path, const std::vector<int>& support) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open " + path + " for writing");
    for (int m : support) out << (m + 1) << '\n'; // 1-based feature numbers
    if (!out) throw ParseError("failed writing " + path);
}

void write_cv_table(const std::string& path, const TuningGrid& grid, const Matrix& table) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open " + path + " for writing");
    out << "gamma1";
    for (double g2 : grid.gamma2_values) out << ',' << real_str(g2);
    out << '\n';
    for (Eigen::Index i = 0; i < table.rows(); ++i) {
        out << real_str(grid.gamma1_values[static_cast<std::size_t>(i)]);
        for (Eigen::Index j = 0; j < table.cols(); ++j) out << ',' << real_str(table(i, j));
        out << '\n';
    }
    if (!out) throw ParseError("failed writing " + path);
}

void print_support(const FittedModel& model, double threshold) {
    const std::vector<int> support = selected_features(model.spec.lambda, threshold);
    std::cout << "selected " << support.size() << " feature(s):";
    for (int m : support) std::cout << ' ' << (m + 1);
    std::cout << '\n';
}

void print_fit_report(const FittedModel& model, double threshold, double seconds) {
    print_support(model, threshold);
    if (!model.trace.empty())
        std::cout << "objective " << model.trace.front() << " -> " << model.trace.back() << " in "
                  << model.diagnostics.outer_iterations << " iteration(s), "
                  << (model.diagnostics.converged ? "converged" : "not converged (warning)")
                  << '\n';
    std::cout << "sigma " << model.spec.sigma << ", elapsed " << seconds << " s\n";
}

int run_app(int argc, const char* const* argv) {
    CLI::App app{"Nonparametric prediction with simultaneous feature selection via a "
                 "weighted tensor-product kernel"};
    app.require_subcommand(1);
    app.fallthrough();
    int workers = default_workers();
    app.add_option("--workers", workers, "worker threads for replicates / CV cells")
        ->capture_default_str();

    // simulate ------------------------------------------------------------
    auto* sim = app.add_subcommand("simulate", "generate a synthetic train/validation pair");
    int sim_study = 1, sim_n = 0, sim_p = 0, sim_nvalid = 2000;
    std::uint64_t sim_seed = 1;
    std::string sim_out;
    sim->add_option("--study", sim_study, "design: 1 regression, 2 classification")
        ->required()
        ->check(CLI::IsMember({1, 2}));
    sim->add_option("--n", sim_n, "training rows")->required()->check(CLI::PositiveNumber);
    sim->add_option("--p", sim_p, "feature count")->required()->check(CLI::PositiveNumber);
    sim->add_option("--n-valid", sim_nvalid, "validation rows")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    sim->add_option("--seed", sim_seed, "RNG seed")->capture_default_str();
    sim->add_option("--out", sim_out, "output directory")->required();
    sim->callback([&]() {
        Rng rng(sim_seed);
        SimInstance inst = sim_study == 1 ? generate_study1(sim_n, sim_p, sim_nvalid, rng)
                                          : generate_study2(sim_n, sim_p, sim_nvalid, rng);
        fs::create_directories(sim_out);
        const fs::path dir(sim_out);
        write_features_csv((dir / "train_features.csv").string(), inst.train.feature_names,
                           inst.train.X);
        write_labels_csv((dir / "train_labels.csv").string(), "y", inst.train.y);
        write_features_csv((dir / "valid_features.csv").string(), inst.validation.feature_names,
                           inst.validation.X);
        write_labels_csv((dir / "valid_labels.csv").string(), "y", inst.validation.y);
        write_truth_file((dir / "truth.txt").string(), inst.true_support);
        std::cout << "wrote train (" << inst.train.n() << "x" << inst.train.p() << "), validation ("
                  << inst.validation.n() << "x" << inst.validation.p() << "), truth to " << sim_out
                  << '\n';
    });

    // fit ------------------------------------------------------------------
    auto* fitcmd = app.add_subcommand("fit", "fit at fixed penalties and save the model");
    std::string fit_features, fit_labels, fit_task, fit_model_out;
    FitConfig fit_config;
    double fit_sigma = 0.0;
    fitcmd->add_option("--features", fit_features, "features CSV")->required();
    fitcmd->add_option("--labels", fit_labels, "labels CSV")->required();
    fitcmd->add_option("--task", fit_task, "regression or classification")
        ->required()
        ->check(CLI::IsMember({"regression", "classification"}));
    fitcmd->add_option("--gamma1", fit_config.gamma1, "RKHS-norm penalty")->required();
    fitcmd->add_option("--gamma2", fit_config.gamma2, "sparsity penalty")->required();
    auto* sigma_opt =
        fitcmd->add_option("--sigma", fit_sigma, "kernel bandwidth (default: median heuristic)");
    fitcmd->add_option("--bound", fit_config.bound, "box bound M")->capture_default_str();
    fitcmd->add_option("--max-outer", fit_config.max_outer, "outer iteration cap")
        ->capture_default_str();
    fitcmd->add_option("--select-threshold", fit_config.select_threshold,
                       "lambda above this counts as selected")
        ->capture_default_str();
    fitcmd->add_option("--model-out", fit_model_out, "model JSON path")->required();
    fitcmd->callback([&]() {
        Dataset data = read_dataset(fit_features, fit_labels, parse_task(fit_task), true);
        const auto t0 = std::chrono::steady_clock::now();
        std::optional<double> sigma;
        if (sigma_opt->count() > 0) sigma = fit_sigma;
        FittedModel model = fit(data, fit_config, sigma);
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
        save_model(model, fit_model_out);
        print_fit_report(model, fit_config.select_threshold, dt.count());
    });

    // cv ---------------------------------------------------------------
    auto* cvcmd = app.add_subcommand("cv", "cross-validate penalties, refit, save the winner");
    std::string cv_features, cv_labels, cv_task, cv_model_out, cv_table_out, cv_grid = "full";
    FitConfig cv_config;
    int cv_folds = 3;
    std::uint64_t cv_seed = 1;
    cvcmd->add_option("--features", cv_features, "features CSV")->required();
    cvcmd->add_option("--labels", cv_labels, "labels CSV")->required();
    cvcmd->add_option("--task", cv_task, "regression or classification")
        ->required()
        ->check(CLI::IsMember({"regression", "classification"}));
    cvcmd->add_option("--folds", cv_folds, "cross-validation folds")->capture_default_str();
    cvcmd->add_option("--grid", cv_grid, "dyadic grid density")
        ->capture_default_str()
        ->check(CLI::IsMember({"full", "coarse"}));
    cvcmd->add_option("--seed", cv_seed, "fold-shuffle seed")->capture_default_str();
    cvcmd->add_option("--bound", cv_config.bound, "box bound M")->capture_default_str();
    cvcmd->add_option("--model-out", cv_model_out, "model JSON path")->required();
    cvcmd->add_option("--cv-out", cv_table_out, "cv table CSV (default: <model-out>.cv.csv)");
    cvcmd->callback([&]() {
        Dataset data = read_dataset(cv_features, cv_labels, parse_task(cv_task), true);
        const TuningGrid grid = TuningGrid::dyadic(cv_grid == "coarse", cv_folds);
        Rng rng(cv_seed);
        CvResult cv = cross_validate(data, grid, cv_config, rng, workers);
        save_model(cv.model, cv_model_out);
        const std::string table_path =
            cv_table_out.empty() ? cv_model_out + ".cv.csv" : cv_table_out;
        write_cv_table(table_path, grid, cv.cv_table);
        std::cout << "best gamma1 " << real_str(cv.best_gamma1) << ", gamma2 "
                  << real_str(cv.best_gamma2) << ", mean held-out score "
                  << cv.cv_table.minCoeff() << '\n';
        print_fit_report(cv.model, cv_config.select_threshold, 0.0);
    });

    // predict -----------------------------------------------------------
    auto* pred = app.add_subcommand("predict", "score new data with a saved model");
    std::string pred_model, pred_features, pred_out;
    pred->add_option("--model", pred_model, "model JSON path")->required();
    pred->add_option("--features", pred_features, "features CSV")->required();
    pred->add_option("--out", pred_out, "predictions CSV path")->required();
    pred->callback([&]() {
        FittedModel model = load_model(pred_model);
        auto [names, X] = read_features_csv(pred_features);
        Vector scores = predict(model, model.standardization.apply(X));
        write_predictions_csv(pred_out, model.task, scores);
        std::cout << "wrote " << scores.size() << " prediction(s) to " << pred_out << '\n';
    });

    // benchmark ----------------------------------------------------------
    auto* bench = app.add_subcommand("benchmark", "replicate a simulation study end to end");
    BenchmarkConfig bench_config;
    int bench_study = 1;
    std::string bench_grid = "coarse", bench_out;
    bench->add_option("--study", bench_study, "design: 1 regression, 2 classification")
        ->required()
        ->check(CLI::IsMember({1, 2}));
    bench->add_option("--n", bench_config.n, "training rows per replicate")
        ->required()
        ->check(CLI::PositiveNumber);
    bench->add_option("--p", bench_config.p, "feature count")
        ->required()
        ->check(CLI::PositiveNumber);
    bench->add_option("--n-valid", bench_config.n_valid, "validation rows")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    bench->add_option("--replicates", bench_config.replicates, "independent repeats")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    bench->add_option("--seed", bench_config.seed, "master seed")->capture_default_str();
    bench->add_option("--grid", bench_grid, "dyadic grid density")
        ->capture_default_str()
        ->check(CLI::IsMember({"full", "coarse"}));
    bench->add_option("--folds", bench_config.folds, "cross-validation folds")
        ->capture_default_str();
    bench->add_option("--out", bench_out, "output directory")->required();
    bench->callback([&]() {
        bench_config.study = bench_study == 1 ? Study::One : Study::Two;
        bench_config.coarse_grid = bench_grid == "coarse";
        bench_config.workers = workers;
        const auto t0 = std::chrono::steady_clock::now();
        BenchmarkResult result = run_benchmark(bench_config);
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;

        fs::create_directories(bench_out);
        const fs::path dir(bench_out);
        {
            std::ofstream out(dir / "replicates.csv");
            if (!out) throw ParseError("cannot open replicates.csv for writing");
            out << "replicate,tpr,tnr,n_selected,error,gamma1,gamma2,converged\n";
            for (std::size_t r = 0; r < result.replicates.size(); ++r) {
                const auto& rep = result.replicates[r];
                out << r << ',' << real_str(rep.report.tpr) << ',' << real_str(rep.report.tnr)
                    << ',' << rep.report.n_selected << ',' << real_str(rep.report.pred_error)
                    << ',' << real_str(rep.gamma1) << ',' << real_str(rep.gamma2) << ','
                    << (rep.converged ? 1 : 0) << '\n';
            }
            if (!out) throw ParseError("failed writing replicates.csv");
        }
        const auto& s = result.summary;
        {
            std::ofstream out(dir / "summary.csv");
            if (!out) throw ParseError("cannot open summary.csv for writing");
            out << "study,n,p,replicates,mean_tpr,mean_tnr,mean_selected,mean_error,mad_error\n";
            out << bench_study << ',' << bench_config.n << ',' << bench_config.p << ','
                << s.replicates << ',' << real_str(s.mean_tpr) << ',' << real_str(s.mean_tnr)
                << ',' << real_str(s.mean_selected) << ',' << real_str(s.mean_error) << ','
                << real_str(s.mad_error) << '\n';
            if (!out) throw ParseError("failed writing summary.csv");
        }
        std::cout << "study " << bench_study << "  n=" << bench_config.n
                  << " p=" << bench_config.p << " replicates=" << s.replicates << '\n'
                  << "TPR " << s.mean_tpr << "  TNR " << s.mean_tnr << "  selected "
                  << s.mean_selected << "  error " << s.mean_error << "  MAD " << s.mad_error
                  << '\n'
                  << "elapsed " << dt.count() << " s\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e); // prints the message / help text
        return code == 0 ? 0 : 1;
    }
    return 0;
}

} // namespace

int run(int argc, const char* const* argv) {
    try {
        return run_app(argc, argv);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

} // namespace kernsel::cli
