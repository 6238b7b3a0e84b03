#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "kernsel/rng.hpp"

namespace kernsel {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Jitter escalation for symmetric solves. Values are relative to the mean
// diagonal magnitude of the system matrix.
struct JitterPolicy {
    double initial_jitter = 1e-10;
    double growth_factor = 10.0;
    double max_jitter = 1e-4;
};

// Solves A x = b for symmetric positive (semi-)definite A by Cholesky,
// escalating a diagonal jitter until the factorization succeeds and the
// residual against the original A satisfies
//   ||Ax - b|| <= 1e-8 (||A||_F ||x|| + ||b||).
// Throws NonPsd if no jitter up to policy.max_jitter achieves that, and
// DimensionMismatch on shape errors.
Vector solve_spd(const Matrix& A, const Vector& b, const JitterPolicy& policy = {});

// Minimizes a convex function on [lo, hi] by bisection on the sign of its
// derivative. Returns lo / hi exactly when the derivative says the minimum
// sits on that boundary, so box-clamped solutions are exact. tol is absolute
// in the argument. Throws InvalidInterval if lo >= hi or tol <= 0.
double minimize_convex_1d(const std::function<double(double)>& deriv,
                          double lo, double hi, double tol = 1e-8);

// Derivative-free fallback: golden-section search on g over [lo, hi], then
// snaps to whichever of {lo of bracket, midpoint, hi of bracket} is lowest.
double minimize_convex_1d_values(const std::function<double(double)>& g,
                                 double lo, double hi, double tol = 1e-8);

// A prescribed off-diagonal entry of a correlation matrix (0-based indices).
struct CorrPair {
    int i = 0;
    int j = 0;
    double rho = 0.0;
};

// Draws an n x p matrix with N(0,1) marginals and the listed pairwise
// correlations (identity correlation elsewhere): X = Z L' with R = L L'.
// Deterministic given the generator state. Throws NotPositiveDefinite when
// the implied correlation matrix has no Cholesky factor, IndexOutOfRange for
// bad pair indices.
Matrix sample_correlated_gaussian(int n, int p, const std::vector<CorrPair>& pairs, Rng& rng);

} // namespace kernsel
