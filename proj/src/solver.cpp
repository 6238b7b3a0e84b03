#include "kernsel/solver.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "kernsel/errors.hpp"

namespace kernsel {

namespace {

// Regression sweeps run unrestricted before the active set freezes. Two
// passes let features that only become attractive after the first re-fit of
// alpha in; beyond that, every further sweep against an adapted alpha lets
// arbitrary features absorb leftover residual, which is what the freeze
// prevents.
constexpr int kScreeningSweeps = 2;

// Classification activates features one at a time instead: each round ranks
// the inactive features by alignment with the loss residual, trials the top
// of the ranking with a re-fitted alpha, and keeps the best genuine
// improvement. Coordinate gains at a fixed alpha are blind to features whose
// value only shows once alpha adapts, which is the common case under the
// exponential loss.
constexpr int kClsScreenRounds = 2;
constexpr int kClsScreenPool = 8;
constexpr double kClsTrialLambda = 1.0;

// Log-spaced scaling candidates for the joint line search over t * lambda.
constexpr int kScaleGrid = 11;
constexpr double kScaleLo = 0.2;
constexpr double kScaleHi = 5.0;

// Minimum relative improvement for committing a lambda move. The
// one-coordinate profile reconstructs the kernel by an entrywise division,
// and near convergence its predicted gains drop below that reconstruction
// noise; accepting such moves lets lambda wander and the objective wobble
// upward by ~1e-7. Verifying every move against the freshly evaluated
// objective keeps the trace monotone and freezes lambda once real gains are
// exhausted.
constexpr double kMoveEps = 1e-10;

// Minimum relative improvement for committing a joint scaling of lambda. The
// scaling direction trades a sliver of training objective for a large move of
// every weight, so at hairline gains it inflates lambda indefinitely when the
// penalties are near zero -- the fit drifts toward interpolation without ever
// settling. Demanding a material gain stops the ray once it only polishes
// noise; single-coordinate moves keep the tighter kMoveEps so convergence
// still means blockwise optimality.
constexpr double kRayEps = 1e-5;

void check_config(const FitConfig& config) {
    if (!(config.gamma1 > 0.0)) throw InvalidInterval("fit: gamma1 must be positive");
    if (!(config.gamma2 >= 0.0)) throw InvalidInterval("fit: gamma2 must be nonnegative");
    if (!(config.bound > 0.0)) throw InvalidInterval("fit: bound must be positive");
    if (config.max_outer < 1) throw InvalidInterval("fit: max_outer must be at least 1");
}

double truncated_lasso(const Vector& lambda, double bound) {
    const double half = 0.5 * bound;
    double total = 0.0;
    for (Eigen::Index m = 0; m < lambda.size(); ++m)
        if (lambda[m] < half) total += lambda[m];
    return total;
}

// One-coordinate objective at t, sharing the profile's affine fit.
double profile_objective(const CoordinateProfile& prof, double t, const Vector& y_work,
                         const ObservationWeights& w, Task task, double gamma1, double gamma2,
                         double bound) {
    const auto n = y_work.size();
    double loss = 0.0;
    if (task == Task::Regression) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double r = y_work[j] - (prof.a[j] + prof.b[j] * t);
            loss += w.w[j] * r * r;
        }
    } else {
        for (Eigen::Index j = 0; j < n; ++j)
            loss += w.w[j] * safe_exp(-y_work[j] * (prof.a[j] + prof.b[j] * t));
    }
    loss /= static_cast<double>(n);
    double penalty = gamma1 * prof.v * t;
    if (t < 0.5 * bound) penalty += gamma2 * t;
    return loss + penalty;
}

// Minimizer of the branch objective (penalty slope fixed at `slope`) over
// [lo, hi]. Regression solves the clamped quadratic vertex in closed form;
// classification bisects on the derivative.
double branch_minimum(const CoordinateProfile& prof, double lo, double hi, double slope,
                      const Vector& y_work, const ObservationWeights& w, Task task) {
    const auto n = y_work.size();
    if (task == Task::Regression) {
        double denom = 0.0, numer = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            denom += w.w[j] * prof.b[j] * prof.b[j];
            numer += w.w[j] * prof.b[j] * (y_work[j] - prof.a[j]);
        }
        numer -= static_cast<double>(n) * slope / 2.0;
        if (denom <= 0.0) return slope >= 0.0 ? lo : hi;
        const double vertex = numer / denom;
        if (vertex <= lo) return lo;
        if (vertex >= hi) return hi;
        return vertex;
    }
    auto deriv = [&](double t) {
        double d = 0.0;
        for (Eigen::Index j = 0; j < n; ++j)
            d += w.w[j] * -y_work[j] * prof.b[j] *
                 safe_exp(-y_work[j] * (prof.a[j] + prof.b[j] * t));
        return d / static_cast<double>(n) + slope;
    };
    return minimize_convex_1d(deriv, lo, hi);
}

// Index of the feature most correlated (in absolute value) with y; ties and
// constant features resolve to the smallest index.
int strongest_feature(const Matrix& X, const Vector& y) {
    Vector yc = y.array() - y.mean();
    int best = 0;
    double best_score = -1.0;
    for (Eigen::Index m = 0; m < X.cols(); ++m) {
        Vector xc = X.col(m).array() - X.col(m).mean();
        const double sx = xc.norm();
        const double score = sx > 0.0 ? std::abs(xc.dot(yc)) / sx : 0.0;
        if (score > best_score) {
            best_score = score;
            best = static_cast<int>(m);
        }
    }
    return best;
}

// Damped Newton iterated to (approximate) stationarity. A warm start that
// scores worse than the zero vector (whose penalized loss is exactly 1 under
// balanced weights) restarts from zero: such starts arise when lambda jumps
// leave the previous alpha in the clamping regime of the exponential loss,
// where the one-step update cannot recover.
Vector newton_refine(const ProductCache& cache, const Vector& y, const ObservationWeights& w,
                     Vector alpha, double gamma1, int backtracks, int steps = 40,
                     double tol = 1e-9) {
    auto value = [&](const Vector& a) {
        Vector f = cache.P * a;
        return loss_value(Task::Classification, w, y, f) + gamma1 * a.dot(f);
    };
    double j = value(alpha);
    if (!(j <= 1.0)) {
        alpha.setZero();
        j = 1.0;
    }
    for (int s = 0; s < steps; ++s) {
        Vector next = alpha_step_classification(cache, y, w, alpha, gamma1, backtracks);
        const double j_next = value(next);
        if (!(j_next < j)) break;
        alpha = std::move(next);
        const bool settled = j - j_next <= tol * (1.0 + std::abs(j_next));
        j = j_next;
        if (settled) break;
    }
    return alpha;
}

} // namespace

double objective(const ProductCache& cache, const Vector& alpha, const Vector& y_work,
                 const ObservationWeights& w, Task task, const FitConfig& config, bool* clamped) {
    if (alpha.size() != cache.P.rows())
        throw DimensionMismatch("objective: alpha length does not match cache");
    Vector f = cache.P * alpha;
    double value = loss_value(task, w, y_work, f, clamped);
    value += config.gamma1 * alpha.dot(f);
    value += config.gamma2 * truncated_lasso(cache.spec.lambda, config.bound);
    return value;
}

Vector alpha_step_regression(const ProductCache& cache, const Vector& y_centered, double gamma1) {
    if (!(gamma1 > 0.0)) throw InvalidInterval("alpha_step_regression: gamma1 must be positive");
    const auto n = cache.P.rows();
    if (y_centered.size() != n)
        throw DimensionMismatch("alpha_step_regression: outcome length does not match cache");
    Matrix A = cache.P;
    A.diagonal().array() += static_cast<double>(n) * gamma1;
    return solve_spd(A, y_centered);
}

Vector alpha_step_classification(const ProductCache& cache, const Vector& y,
                                 const ObservationWeights& w, const Vector& alpha0,
                                 double gamma1, int backtracks) {
    if (!(gamma1 > 0.0))
        throw InvalidInterval("alpha_step_classification: gamma1 must be positive");
    const auto n = cache.P.rows();
    if (y.size() != n || alpha0.size() != n)
        throw DimensionMismatch("alpha_step_classification: length mismatch");
    const Matrix& P = cache.P;
    const double ninv = 1.0 / static_cast<double>(n);

    Vector f0 = P * alpha0;
    LossDerivatives d = loss_derivatives(Task::Classification, w, y, f0);
    Vector grad = P * (ninv * d.g + 2.0 * gamma1 * alpha0);
    Vector dir;
    try {
        Matrix H = ninv * (P * d.h.asDiagonal() * P) + 2.0 * gamma1 * P;
        dir = solve_spd(H, grad);
    } catch (const NonPsd&) {
        // The Hessian has no identity ridge, so an ill-conditioned P can
        // defeat the jitter ladder; fall back to a backtracked gradient step.
        dir = grad / std::max(grad.norm(), 1e-30);
    }

    const double j0 = loss_value(Task::Classification, w, y, f0) + gamma1 * alpha0.dot(f0);
    Vector pdir = P * dir;
    double t = 1.0;
    for (int k = 0; k < backtracks; ++k, t *= 0.5) {
        Vector alpha_t = alpha0 - t * dir;
        Vector f_t = f0 - t * pdir;
        const double jt =
            loss_value(Task::Classification, w, y, f_t) + gamma1 * alpha_t.dot(f_t);
        if (jt <= j0) return alpha_t;
    }
    return alpha0;
}

double lambda_coordinate_step(int q, const ProductCache& cache, const Vector& alpha,
                              const Vector& y_work, const ObservationWeights& w, Task task,
                              const FitConfig& config) {
    const CoordinateProfile prof = coordinate_profile(cache, q, alpha);
    const double M = config.bound;
    const double half = 0.5 * M;

    const double slope_low = config.gamma1 * prof.v + config.gamma2;
    const double slope_high = config.gamma1 * prof.v;
    const double cand_low = branch_minimum(prof, 0.0, half, slope_low, y_work, w, task);
    const double cand_high = branch_minimum(prof, half, M, slope_high, y_work, w, task);

    double best = cache.spec.lambda[q];
    double best_h = profile_objective(prof, best, y_work, w, task, config.gamma1, config.gamma2, M);
    for (double cand : {cand_low, cand_high}) {
        const double h = profile_objective(prof, cand, y_work, w, task, config.gamma1,
                                           config.gamma2, M);
        if (h < best_h || (h == best_h && cand < best)) {
            best_h = h;
            best = cand;
        }
    }
    return best;
}

FittedModel fit(const Dataset& data, const FitConfig& config, std::optional<double> sigma,
                std::shared_ptr<const std::vector<Matrix>> blocks) {
    check_config(config);
    const int n = data.n();
    const int p = data.p();
    if (n < 2) throw DegenerateData("fit: need at least two observations");
    if (p < 1) throw DimensionMismatch("fit: need at least one feature");
    if (data.y.size() != n) throw DimensionMismatch("fit: outcome length does not match X");

    FittedModel model;
    model.task = data.task;
    model.train_X = data.X;
    model.standardization = data.standardization;

    Vector y_work;
    Vector lambda0 = Vector::Zero(p);
    if (data.task == Task::Regression) {
        model.y_center = data.y.mean();
        y_work = data.y.array() - model.y_center;
        model.weights = ObservationWeights::uniform(n);
    } else {
        model.weights = ObservationWeights::balanced(data.y); // validates labels
        model.y_center = 0.0;
        y_work = data.y;
        lambda0[strongest_feature(data.X, data.y)] = 1.0;
    }

    KernelSpec spec;
    spec.lambda = lambda0;
    spec.sigma = sigma ? *sigma : median_bandwidth(data.X);
    spec.bound = config.bound;

    ProductCache cache =
        blocks ? build_product_cache(std::move(blocks), spec) : build_product_cache(data.X, spec);

    Vector alpha = Vector::Zero(n);
    bool clamped = false;
    double L_prev = objective(cache, alpha, y_work, model.weights, data.task, config, &clamped);

    auto current_objective = [&]() {
        return objective(cache, alpha, y_work, model.weights, data.task, config, &clamped);
    };

    // Exact ridge (regression) or refined Newton (classification) advance of
    // alpha at the current lambda.
    auto update_alpha = [&]() {
        if (data.task == Task::Regression) {
            Vector cand = alpha_step_regression(cache, y_work, config.gamma1);
            // The closed form cannot increase the objective; the guard only
            // protects against jitter-level round-off.  The tolerance matters at
            // the first iteration, where the candidate ties the zero vector
            // exactly in real arithmetic and round-off decides the comparison.
            const double L_old =
                objective(cache, alpha, y_work, model.weights, data.task, config);
            const double L_new =
                objective(cache, cand, y_work, model.weights, data.task, config);
            if (L_new <= L_old + 1e-12 * (1.0 + std::abs(L_old))) alpha = std::move(cand);
        } else {
            alpha = newton_refine(cache, y_work, model.weights, alpha, config.gamma1,
                                  config.newton_backtracks);
        }
    };

    // Re-fit alpha for a trial cache without touching the main state.
    auto trial_alpha = [&](const ProductCache& c) {
        return data.task == Task::Regression
                   ? alpha_step_regression(c, y_work, config.gamma1)
                   : newton_refine(c, y_work, model.weights, alpha, config.gamma1,
                                   config.newton_backtracks);
    };

    // Joint line search over t * lambda with alpha re-solved per candidate;
    // keeps the best materially improving scaling. Single-coordinate moves
    // re-balance against the other weights through alpha and advance this
    // direction too slowly to terminate on their own.
    auto scale_step = [&](double& L_cur, bool& moved) {
        if (cache.spec.lambda.maxCoeff() <= 0.0) return;
        double best_L = L_cur;
        Vector best_lambda;
        Vector best_alpha;
        ProductCache scratch = cache;
        for (int k = 0; k < kScaleGrid; ++k) {
            const double t =
                kScaleLo * std::pow(kScaleHi / kScaleLo,
                                    static_cast<double>(k) / (kScaleGrid - 1));
            try {
                scratch.spec.lambda = (cache.spec.lambda * t).cwiseMin(config.bound);
                scratch.rebuild();
                Vector cand = trial_alpha(scratch);
                const double L_t =
                    objective(scratch, cand, y_work, model.weights, data.task, config);
                if (L_t < best_L - kRayEps * (1.0 + std::abs(best_L))) {
                    best_L = L_t;
                    best_lambda = scratch.spec.lambda;
                    best_alpha = std::move(cand);
                }
            } catch (const Error&) {
                continue; // overflowing or unsolvable scalings are just skipped
            }
        }
        if (best_lambda.size() > 0) {
            cache.spec.lambda = std::move(best_lambda);
            cache.rebuild();
            alpha = std::move(best_alpha);
            L_cur = best_L;
            moved = true;
        }
    };

    // One classification activation round: rank the inactive features by
    // alignment of their kernel block with the loss residual, trial the top
    // of the ranking at a unit lambda with alpha re-fitted, and commit the
    // best improvement. At a fixed alpha the coordinate step prices every
    // inactive feature below the penalty slope, so activation decisions must
    // compare re-fitted objectives.
    auto screen_round = [&](double& L_cur, bool& moved) {
        Vector f = cache.P * alpha;
        LossDerivatives d = loss_derivatives(Task::Classification, model.weights, y_work, f);
        Vector r = -d.g / static_cast<double>(n);
        std::vector<std::pair<double, int>> scored;
        scored.reserve(p);
        for (int q = 0; q < p; ++q)
            if (cache.spec.lambda[q] == 0.0) scored.emplace_back(r.dot(cache.block(q) * r), q);
        const int pool = std::min<int>(kClsScreenPool, static_cast<int>(scored.size()));
        std::partial_sort(scored.begin(), scored.begin() + pool, scored.end(),
                          [](const auto& a, const auto& b) { return a.first > b.first; });
        int best_q = -1;
        double best_L = L_cur;
        Vector best_alpha;
        for (int i = 0; i < pool; ++i) {
            const int q = scored[i].second;
            ProductCache scratch = cache;
            try {
                scratch.set_lambda(q, kClsTrialLambda);
                Vector cand = trial_alpha(scratch);
                const double L_t =
                    objective(scratch, cand, y_work, model.weights, data.task, config);
                if (L_t < best_L - kMoveEps * (1.0 + std::abs(L_cur))) {
                    best_L = L_t;
                    best_q = q;
                    best_alpha = std::move(cand);
                }
            } catch (const Error&) {
                continue;
            }
        }
        if (best_q >= 0) {
            cache.set_lambda(best_q, kClsTrialLambda);
            alpha = std::move(best_alpha);
            L_cur = best_L;
            moved = true;
        }
    };

    // Backward elimination: drop any active feature whose removal improves
    // the re-fitted objective. This is what retires a start or an activation
    // that stopped paying for its penalty.
    auto prune_step = [&](std::vector<int>& active, double& L_cur, bool& moved) {
        for (int q : active) {
            if (cache.spec.lambda[q] <= 0.0) continue;
            ProductCache scratch = cache;
            try {
                scratch.set_lambda(q, 0.0);
                Vector cand = trial_alpha(scratch);
                const double L_t =
                    objective(scratch, cand, y_work, model.weights, data.task, config);
                if (L_t <= L_cur - kMoveEps * (1.0 + std::abs(L_cur))) {
                    cache.set_lambda(q, 0.0);
                    alpha = std::move(cand);
                    L_cur = L_t;
                    moved = true;
                }
            } catch (const Error&) {
                continue;
            }
        }
    };

    // A lambda move is committed only when the freshly evaluated objective
    // confirms the profile's predicted gain; see kMoveEps.
    auto guarded_coordinate_move = [&](int q, double& L_cur, bool& moved) {
        const double old = cache.spec.lambda[q];
        const double next =
            lambda_coordinate_step(q, cache, alpha, y_work, model.weights, data.task, config);
        if (next == old) return false;
        cache.set_lambda(q, next);
        const double L_new = objective(cache, alpha, y_work, model.weights, data.task, config);
        if (L_new <= L_cur - kMoveEps * (1.0 + std::abs(L_cur))) {
            L_cur = L_new;
            moved = true;
            return true;
        }
        cache.set_lambda(q, old);
        return false;
    };

    // Phase one screens for the active set: regression sweeps the plain
    // alternation over all coordinates while alpha is still coarse, so only
    // features whose improvement beats the penalty slope activate;
    // classification runs ranked activation rounds instead (see
    // screen_round). The active set is then frozen and saturated -- alpha is
    // re-solved after each accepted move, a scaling search and a pruning pass
    // close each sweep -- so the selected block reaches its joint optimum
    // instead of inching along while leftover residual leaks into irrelevant
    // features.
    std::vector<int> active;
    bool restricted = false;
    const int screen_iters =
        data.task == Task::Regression ? kScreeningSweeps : kClsScreenRounds;

    for (int iter = 1; iter <= config.max_outer; ++iter) {
        const Vector lambda_snapshot = cache.spec.lambda;

        update_alpha();
        double L_cur = current_objective();
        bool moved = false;

        if (!restricted) {
            if (data.task == Task::Regression) {
                for (int q = 0; q < p; ++q) guarded_coordinate_move(q, L_cur, moved);
            } else {
                screen_round(L_cur, moved);
                scale_step(L_cur, moved);
            }
        } else {
            for (int q : active) {
                if (guarded_coordinate_move(q, L_cur, moved)) {
                    update_alpha();
                    L_cur = current_objective();
                }
            }
            scale_step(L_cur, moved);
            prune_step(active, L_cur, moved);
        }
        cache.rebuild(); // clear the entrywise-repair drift once per sweep

        const double L = current_objective();
        model.trace.push_back(L);
        model.diagnostics.outer_iterations = iter;

        if (!restricted && iter == screen_iters) {
            for (int q = 0; q < p; ++q)
                if (cache.spec.lambda[q] > 0.0) active.push_back(q);
            restricted = true;
        }

        const double dl = (cache.spec.lambda - lambda_snapshot).lpNorm<1>();
        const bool settled =
            std::abs(L - L_prev) <= config.cut_obj * (1.0 + std::abs(L)) && dl <= config.cut_lambda;
        L_prev = L;
        if (settled) {
            model.diagnostics.converged = true;
            break;
        }
    }

    model.diagnostics.loss_clamped = clamped;
    model.spec = cache.spec;
    model.alpha = std::move(alpha);
    return model;
}

Vector predict(const FittedModel& model, const Matrix& X_new) {
    if (X_new.cols() != model.train_X.cols())
        throw DimensionMismatch("predict: feature count does not match the training data");
    Vector scores = gram(X_new, model.train_X, model.spec) * model.alpha;
    scores.array() += model.y_center;
    return scores;
}

} // namespace kernsel

