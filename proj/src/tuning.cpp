#include "kernsel/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "kernsel/errors.hpp"
#include "kernsel/metrics.hpp"
#include "kernsel/parallel.hpp"

namespace kernsel {

namespace {

// Iteration cap for every fit run inside cross-validation, fold fits and the
// winner refit alike. Pathological cells (tiny penalties that reward
// indefinitely inflating lambda) crawl for the whole iteration budget without
// improving their held-out score, and they dominate the search cost. The
// refit must run under the same cap the fold fits were scored with: the fold
// scores estimate the risk of the capped pipeline, and an uncapped refit at a
// near-zero-penalty winner keeps polishing the training objective past the
// state the scores vouched for.
constexpr int kFoldMaxOuter = 15;

// Fisher-Yates with our own uniform draws so the fold layout depends only on
// the generator state, not on library shuffle internals.
void shuffle_indices(std::vector<int>& idx, Rng& rng) {
    for (std::size_t i = idx.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(runif(rng) * static_cast<double>(i));
        std::swap(idx[i - 1], idx[j < i ? j : i - 1]);
    }
}

// Near-equal fold labels, stratified by class for classification so every
// training fold keeps both labels whenever possible.
std::vector<int> assign_folds(const Dataset& data, int folds, Rng& rng) {
    const int n = data.n();
    std::vector<int> fold_of(static_cast<std::size_t>(n), 0);
    auto deal = [&](std::vector<int>& idx) {
        shuffle_indices(idx, rng);
        for (std::size_t i = 0; i < idx.size(); ++i)
            fold_of[static_cast<std::size_t>(idx[i])] = static_cast<int>(i % static_cast<std::size_t>(folds));
    };
    if (data.task == Task::Classification) {
        std::vector<int> pos, neg;
        for (int i = 0; i < n; ++i) (data.y[i] > 0.0 ? pos : neg).push_back(i);
        deal(pos);
        deal(neg);
    } else {
        std::vector<int> all(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
        deal(all);
    }
    return fold_of;
}

struct FoldData {
    Dataset train;
    Matrix heldout_X;
    Vector heldout_y;
    std::shared_ptr<const std::vector<Matrix>> blocks;
};

FoldData make_fold(const Dataset& data, const std::vector<int>& fold_of, int fold, double sigma) {
    const int n = data.n();
    std::vector<int> in, out;
    for (int i = 0; i < n; ++i) (fold_of[static_cast<std::size_t>(i)] == fold ? out : in).push_back(i);
    FoldData fd;
    fd.train.task = data.task;
    fd.train.feature_names = data.feature_names;
    fd.train.standardization = data.standardization;
    fd.train.X.resize(static_cast<Eigen::Index>(in.size()), data.X.cols());
    fd.train.y.resize(static_cast<Eigen::Index>(in.size()));
    for (std::size_t r = 0; r < in.size(); ++r) {
        fd.train.X.row(static_cast<Eigen::Index>(r)) = data.X.row(in[r]);
        fd.train.y[static_cast<Eigen::Index>(r)] = data.y[in[r]];
    }
    fd.heldout_X.resize(static_cast<Eigen::Index>(out.size()), data.X.cols());
    fd.heldout_y.resize(static_cast<Eigen::Index>(out.size()));
    for (std::size_t r = 0; r < out.size(); ++r) {
        fd.heldout_X.row(static_cast<Eigen::Index>(r)) = data.X.row(out[r]);
        fd.heldout_y[static_cast<Eigen::Index>(r)] = data.y[out[r]];
    }
    fd.blocks = std::make_shared<const std::vector<Matrix>>(make_feature_blocks(fd.train.X, sigma));
    return fd;
}

} // namespace

TuningGrid TuningGrid::dyadic(bool coarse, int folds) {
    TuningGrid grid;
    grid.folds = folds;
    const int step = coarse ? 4 : 2;
    for (int e = -15; e <= 15; e += step) {
        grid.gamma1_values.push_back(std::ldexp(1.0, e));
        grid.gamma2_values.push_back(std::ldexp(1.0, e));
    }
    return grid;
}

CvResult cross_validate(const Dataset& data, const TuningGrid& grid, const FitConfig& base,
                        Rng& rng, int workers) {
    const int n = data.n();
    const int folds = grid.folds;
    if (folds < 2) throw InvalidInterval("cross_validate: need at least two folds");
    if (n < folds) throw DegenerateData("cross_validate: fewer observations than folds");
    if (grid.gamma1_values.empty() || grid.gamma2_values.empty())
        throw InvalidInterval("cross_validate: empty tuning grid");

    const double sigma = median_bandwidth(data.X);
    const std::vector<int> fold_of = assign_folds(data, folds, rng);

    std::vector<FoldData> fold_data;
    fold_data.reserve(static_cast<std::size_t>(folds));
    for (int k = 0; k < folds; ++k) {
        fold_data.push_back(make_fold(data, fold_of, k, sigma));
        if (fold_data.back().train.n() < 2)
            throw DegenerateData("cross_validate: a training fold has fewer than two rows");
        if (data.task == Task::Classification) {
            const Vector& ytr = fold_data.back().train.y;
            const bool has_pos = (ytr.array() > 0.0).any();
            const bool has_neg = (ytr.array() < 0.0).any();
            if (!has_pos || !has_neg)
                throw DegenerateData("cross_validate: a training fold lacks one of the classes");
        }
    }

    const int n1 = static_cast<int>(grid.gamma1_values.size());
    const int n2 = static_cast<int>(grid.gamma2_values.size());
    CvResult result;
    result.sigma = sigma;
    result.cv_table.setZero(n1, n2);
    result.fold_scores.assign(static_cast<std::size_t>(folds), Matrix::Zero(n1, n2));

    parallel_for(n1 * n2, workers, [&](int cell) {
        const int i1 = cell / n2;
        const int i2 = cell % n2;
        FitConfig config = base;
        config.gamma1 = grid.gamma1_values[static_cast<std::size_t>(i1)];
        config.gamma2 = grid.gamma2_values[static_cast<std::size_t>(i2)];
        config.max_outer = std::min(config.max_outer, kFoldMaxOuter);
        for (int k = 0; k < folds; ++k) {
            const FoldData& fd = fold_data[static_cast<std::size_t>(k)];
            double score;
            try {
                FittedModel m = fit(fd.train, config, sigma, fd.blocks);
                score = prediction_metrics(data.task, predict(m, fd.heldout_X), fd.heldout_y);
            } catch (const Error&) {
                // A pathological cell (overflow, failed factorization) loses
                // the comparison instead of aborting the whole search.
                score = std::numeric_limits<double>::infinity();
            }
            result.fold_scores[static_cast<std::size_t>(k)](i1, i2) = score;
        }
    });

    for (int k = 0; k < folds; ++k) result.cv_table += result.fold_scores[static_cast<std::size_t>(k)];
    result.cv_table /= static_cast<double>(folds);

    int best1 = 0, best2 = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int i1 = 0; i1 < n1; ++i1)
        for (int i2 = 0; i2 < n2; ++i2) {
            const double s = result.cv_table(i1, i2);
            // Minimum mean score; ties prefer the sparser/smoother corner:
            // larger gamma2, then larger gamma1.
            const bool better =
                s < best || (s == best && (i2 > best2 || (i2 == best2 && i1 > best1)));
            if ((i1 == 0 && i2 == 0) || better) {
                best = s;
                best1 = i1;
                best2 = i2;
            }
        }

    result.best_gamma1 = grid.gamma1_values[static_cast<std::size_t>(best1)];
    result.best_gamma2 = grid.gamma2_values[static_cast<std::size_t>(best2)];
    FitConfig config = base;
    config.gamma1 = result.best_gamma1;
    config.gamma2 = result.best_gamma2;
    config.max_outer = std::min(config.max_outer, kFoldMaxOuter);
    result.model = fit(data, config, sigma);
    return result;
}

} // namespace kernsel
