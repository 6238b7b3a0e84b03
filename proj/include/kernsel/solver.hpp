#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "kernsel/dataset.hpp"
#include "kernsel/kernel.hpp"
#include "kernsel/loss.hpp"

namespace kernsel {

// Tuning and stopping parameters of the alternating fit.
struct FitConfig {
    double gamma1 = 1.0;          // RKHS-norm penalty weight, > 0
    double gamma2 = 1.0;          // truncated-Lasso penalty weight, >= 0
    double bound = 1e5;           // box bound M on each lambda_m
    double cut_obj = 1e-5;        // stop when |dL| <= cut_obj * (1 + |L|)
    double cut_lambda = 1e-4;     // ... and ||d lambda||_1 <= cut_lambda
    int max_outer = 100;          // outer-iteration cap
    int newton_backtracks = 30;   // classification step halvings to try
    double select_threshold = 1e-10; // lambda_m above this counts as selected
};

struct FitDiagnostics {
    bool converged = false;   // stopping rule met before max_outer
    int outer_iterations = 0; // outer iterations actually run
    bool loss_clamped = false; // an exponential-loss exponent hit the clamp
};

// Result of a fit: predictions are f(x) = sum_i alpha_i k(x, X_i) + y_center.
struct FittedModel {
    KernelSpec spec;    // final lambda, sigma, bound
    Vector alpha;
    Matrix train_X;
    Task task = Task::Regression;
    double y_center = 0.0; // training-outcome mean (0 for classification)
    ObservationWeights weights;
    std::vector<double> trace; // objective after each outer iteration, nonincreasing
    FitDiagnostics diagnostics;
    Standardization standardization; // raw -> training-scale feature map
};

// Penalized objective at the cache's current lambda:
//   n^{-1} sum_j w_j l(y_j, (P alpha)_j) + gamma1 alpha' P alpha
//   + gamma2 sum_m lambda_m 1(lambda_m < M/2).
// y_work is the centered outcome (regression) or the -1/+1 labels.
double objective(const ProductCache& cache, const Vector& alpha, const Vector& y_work,
                 const ObservationWeights& w, Task task, const FitConfig& config,
                 bool* clamped = nullptr);

// Exact minimizer of the squared-loss subproblem in alpha at fixed lambda,
// via the representer system (P + n gamma1 I) alpha = y_centered, which
// shares its stationary points with the normal-equation form and stays
// solvable when P is rank-deficient (lambda = 0 makes P all-ones).
Vector alpha_step_regression(const ProductCache& cache, const Vector& y_centered, double gamma1);

// Damped one-step Newton update for the exponential-loss subproblem:
// direction from H = n^{-1} P diag(h) P + 2 gamma1 P against
// G = n^{-1} P g + 2 gamma1 P alpha0, step halved until the subproblem
// objective does not increase; returns alpha0 unchanged if no step works.
Vector alpha_step_classification(const ProductCache& cache, const Vector& y,
                                 const ObservationWeights& w, const Vector& alpha0,
                                 double gamma1, int backtracks);

// Minimizes the one-coordinate objective
//   h(t) = n^{-1} sum_j w_j l(y_j, a_j + b_j t) + gamma1 v t
//          + gamma2 t 1(t < M/2)
// over t in [0, M] by solving the two convex branches that the penalty's
// truncation creates, keeping the current value as a fallback candidate.
// Ties go to the smaller t. Returns the winning value without mutating the
// cache.
double lambda_coordinate_step(int q, const ProductCache& cache, const Vector& alpha,
                              const Vector& y_work, const ObservationWeights& w, Task task,
                              const FitConfig& config);

// Alternating minimization: one alpha-step then one full coordinate sweep
// per outer iteration, stopping when both objective and lambda movements
// fall under the cut points. sigma defaults to the median-distance
// bandwidth of data.X; precomputed feature blocks (matching data.X and
// sigma) may be supplied to share work across fits.
FittedModel fit(const Dataset& data, const FitConfig& config,
                std::optional<double> sigma = std::nullopt,
                std::shared_ptr<const std::vector<Matrix>> blocks = nullptr);

// Kernel-expansion predictions: regression values, or real-valued
// classification scores (label = sign, with sign(0) -> +1). Inputs must
// already be on the training feature scale.
Vector predict(const FittedModel& model, const Matrix& X_new);

} // namespace kernsel
