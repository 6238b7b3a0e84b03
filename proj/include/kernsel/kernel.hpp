#pragma once

#include <memory>
#include <vector>

#include "kernsel/numerics.hpp"

namespace kernsel {

// Parameters of the weighted tensor-product kernel
//   k(x, z) = prod_m (1 + lambda_m * exp(-(x_m - z_m)^2 / (2 sigma^2))).
// Each lambda_m lives in [0, bound]; a zero weight removes feature m from
// the product entirely.
struct KernelSpec {
    Vector lambda;      // per-feature weights, length p
    double sigma = 1.0; // shared Gaussian bandwidth
    double bound = 1e5; // box bound M on each lambda_m
};

// Univariate Gaussian factor exp(-(x-y)^2/(2 sigma^2)) in (0, 1].
// Throws InvalidBandwidth if sigma <= 0.
double gauss1d(double x, double y, double sigma);

// Median of the n(n-1)/2 pairwise Euclidean row distances of X; if that
// median is zero, the smallest nonzero distance. Throws DegenerateData when
// every pair coincides (or n < 2). This is the solver's default bandwidth.
double median_bandwidth(const Matrix& X);

// Full kernel matrix between the rows of X (n x p) and Z (m x p). Features
// with lambda_m = 0 contribute a factor of 1 and are skipped. Throws
// Overflow if any entry exceeds 1e300, DimensionMismatch on column
// disagreement.
Matrix gram(const Matrix& X, const Matrix& Z, const KernelSpec& spec);

// Per-feature Gaussian Gram blocks G_m(i,j) = gauss1d(X(i,m), X(j,m), sigma).
// Blocks depend only on X and sigma, so one set can back many caches with
// different lambda vectors.
std::vector<Matrix> make_feature_blocks(const Matrix& X, double sigma);

// Training-set kernel matrix maintained incrementally under per-coordinate
// lambda updates. P always equals the entrywise product of (1 + lambda_m G_m)
// over features, up to the round-off that rebuild() clears.
struct ProductCache {
    std::shared_ptr<const std::vector<Matrix>> blocks;
    KernelSpec spec;
    Matrix P;

    int n() const { return static_cast<int>(P.rows()); }
    int p() const { return static_cast<int>(spec.lambda.size()); }
    const Matrix& block(int q) const;

    // Replaces lambda_q, repairing P entrywise by the factor ratio
    // (1 + new G_q) / (1 + old G_q). Throws Overflow past 1e300.
    void set_lambda(int q, double value);

    // Recomputes P from the blocks, clearing accumulated drift.
    void rebuild();
};

ProductCache build_product_cache(const Matrix& X, const KernelSpec& spec);
ProductCache build_product_cache(std::shared_ptr<const std::vector<Matrix>> blocks,
                                 const KernelSpec& spec);

// Affine decomposition of the fit in a single coordinate lambda_q: with
// C = P / (1 + lambda_q G_q) entrywise, the training predictions are
// f_j(lambda_q) = a_j + b_j lambda_q and the quadratic form alpha' K alpha
// equals a constant plus v lambda_q. v >= 0 up to round-off because C o G_q
// is a product of positive semidefinite matrices.
struct CoordinateProfile {
    Vector a;
    Vector b;
    double v = 0.0;
};

CoordinateProfile coordinate_profile(const ProductCache& cache, int q, const Vector& alpha);

} // namespace kernsel
