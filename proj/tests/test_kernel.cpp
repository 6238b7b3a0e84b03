#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <vector>

#include "kernsel/errors.hpp"
#include "kernsel/kernel.hpp"
#include "kernsel/rng.hpp"

using namespace kernsel;

namespace {

Matrix random_matrix(int n, int p, Rng& rng) {
    Matrix X(n, p);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) X(i, j) = rnorm(rng);
    return X;
}

Vector random_lambda(int p, double hi, Rng& rng) {
    Vector lambda(p);
    for (int m = 0; m < p; ++m) lambda[m] = runif(rng) * hi;
    return lambda;
}

// From-scratch oracle for the tensor-product Gram entry.
double gram_entry(const Matrix& X, const Matrix& Z, int i, int j, const KernelSpec& spec) {
    double prod = 1.0;
    for (Eigen::Index m = 0; m < X.cols(); ++m)
        prod *= 1.0 + spec.lambda[m] * gauss1d(X(i, m), Z(j, m), spec.sigma);
    return prod;
}

} // namespace

TEST_CASE("gauss1d: pinned values") {
    CHECK(gauss1d(0, 0, 1) == 1.0);
    CHECK(gauss1d(0, 2, 1) == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
    CHECK(gauss1d(1, 3, 2) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
    CHECK_THROWS_AS(gauss1d(0, 1, 0.0), InvalidBandwidth);
    CHECK_THROWS_AS(gauss1d(0, 1, -1.0), InvalidBandwidth);
}

TEST_CASE("median_bandwidth: hand-enumerated distances") {
    Matrix X(3, 1);
    X << 0, 1, 3; // pairwise distances {1, 3, 2}, median 2
    CHECK(median_bandwidth(X) == doctest::Approx(2.0).epsilon(1e-14));

    Matrix P(2, 2);
    P << 0, 0, 3, 4; // single pair at distance 5
    CHECK(median_bandwidth(P) == doctest::Approx(5.0).epsilon(1e-14));
}

TEST_CASE("median_bandwidth: brute-force oracle on random data") {
    Rng rng(33);
    Matrix X = random_matrix(10, 5, rng);
    std::vector<double> d;
    for (int i = 0; i < 10; ++i)
        for (int j = i + 1; j < 10; ++j) d.push_back((X.row(i) - X.row(j)).norm());
    std::sort(d.begin(), d.end());
    // 45 distances: odd count, median is the middle element.
    CHECK(median_bandwidth(X) == doctest::Approx(d[22]).epsilon(1e-14));
}

TEST_CASE("median_bandwidth: zero median falls back to smallest nonzero distance") {
    Matrix X(5, 1);
    X << 0, 0, 0, 0, 1; // 10 distances: six 0s, four 1s -> median 0
    CHECK(median_bandwidth(X) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("median_bandwidth: identical rows are degenerate") {
    Matrix X = Matrix::Zero(4, 2);
    CHECK_THROWS_AS(median_bandwidth(X), DegenerateData);
    CHECK_THROWS_AS(median_bandwidth(Matrix::Zero(1, 2)), DegenerateData);
}

TEST_CASE("gram: lambda = 0 gives the all-ones matrix") {
    Rng rng(1);
    Matrix X = random_matrix(5, 3, rng);
    KernelSpec spec;
    spec.lambda = Vector::Zero(3);
    spec.sigma = 1.3;
    CHECK(gram(X, X, spec) == Matrix::Ones(5, 5));
}

TEST_CASE("gram: pinned small values") {
    // Self-kernel diagonal with lambda = (1, 0): (1+1)(1+0) = 2.
    Rng rng(2);
    Matrix X = random_matrix(4, 2, rng);
    KernelSpec spec;
    spec.lambda = Vector::Zero(2);
    spec.lambda[0] = 1.0;
    spec.sigma = 0.7;
    Matrix K = gram(X, X, spec);
    for (int i = 0; i < 4; ++i) CHECK(K(i, i) == doctest::Approx(2.0).epsilon(1e-14));

    // p=1, lambda=2, x=z=0: 1 + 2*1 = 3.
    Matrix Z = Matrix::Zero(1, 1);
    KernelSpec one;
    one.lambda = Vector::Constant(1, 2.0);
    one.sigma = 1.0;
    CHECK(gram(Z, Z, one)(0, 0) == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("gram: column mismatch and overflow") {
    Rng rng(3);
    Matrix X = random_matrix(4, 3, rng);
    Matrix Z = random_matrix(4, 2, rng);
    KernelSpec spec;
    spec.lambda = Vector::Ones(3);
    CHECK_THROWS_AS(gram(X, Z, spec), DimensionMismatch);

    // (1 + 2e4)^70 > 1e300 on the diagonal.
    Matrix W = Matrix::Zero(2, 70);
    KernelSpec big;
    big.lambda = Vector::Constant(70, 2e4);
    big.sigma = 1.0;
    CHECK_THROWS_AS(gram(W, W, big), Overflow);
}

TEST_CASE("build_product_cache: all-ones at lambda = 0 and entrywise-product oracle") {
    Rng rng(4);
    Matrix X = random_matrix(8, 3, rng);
    KernelSpec spec;
    spec.lambda = Vector::Zero(3);
    spec.sigma = 1.1;
    ProductCache cache = build_product_cache(X, spec);
    CHECK(cache.P == Matrix::Ones(8, 8));
    for (int m = 0; m < 3; ++m) {
        const Matrix& G = cache.block(m);
        CHECK(G.isApprox(G.transpose(), 1e-14));
        for (int i = 0; i < 8; ++i) CHECK(G(i, i) == 1.0);
    }

    spec.lambda = random_lambda(3, 2.0, rng);
    cache = build_product_cache(X, spec);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
            CHECK(cache.P(i, j) >= 1.0);
            CHECK(cache.P(i, j) ==
                  doctest::Approx(gram_entry(X, X, i, j, spec)).epsilon(1e-12));
        }
}

TEST_CASE("set_lambda: entrywise repair tracks the from-scratch product") {
    Rng rng(5);
    Matrix X = random_matrix(7, 3, rng);
    KernelSpec spec;
    spec.lambda = random_lambda(3, 1.5, rng);
    spec.sigma = 0.9;
    spec.bound = 10.0;
    ProductCache cache = build_product_cache(X, spec);
    for (double v : {0.0, 0.3, 2.7, 10.0, 0.05}) {
        cache.set_lambda(1, v);
        KernelSpec fresh = cache.spec;
        Matrix P0 = build_product_cache(X, fresh).P;
        CHECK(cache.P.isApprox(P0, 1e-9));
    }
    cache.rebuild();
    Matrix P0 = build_product_cache(X, cache.spec).P;
    CHECK(cache.P == P0);
}

TEST_CASE("coordinate_profile: zero alpha and single-point identities") {
    Rng rng(6);
    Matrix X = random_matrix(5, 2, rng);
    KernelSpec spec;
    spec.lambda = random_lambda(2, 1.0, rng);
    ProductCache cache = build_product_cache(X, spec);
    CoordinateProfile prof = coordinate_profile(cache, 0, Vector::Zero(5));
    CHECK(prof.a.isZero(0));
    CHECK(prof.b.isZero(0));
    CHECK(prof.v == 0.0);

    // n=1, p=1: C = 1, so a = alpha_1, b = alpha_1, v = alpha_1^2.
    Matrix one = Matrix::Constant(1, 1, 0.4);
    KernelSpec s1;
    s1.lambda = Vector::Constant(1, 0.8);
    ProductCache c1 = build_product_cache(one, s1);
    Vector alpha = Vector::Constant(1, -1.7);
    CoordinateProfile p1 = coordinate_profile(c1, 0, alpha);
    CHECK(p1.a[0] == doctest::Approx(-1.7).epsilon(1e-14));
    CHECK(p1.b[0] == doctest::Approx(-1.7).epsilon(1e-14));
    CHECK(p1.v == doctest::Approx(1.7 * 1.7).epsilon(1e-14));

    CHECK_THROWS_AS(coordinate_profile(cache, 5, Vector::Zero(5)), IndexOutOfRange);
}

TEST_CASE("coordinate_profile: affine identity against the from-scratch Gram") {
    Rng rng(7);
    Matrix X = random_matrix(6, 3, rng);
    KernelSpec spec;
    spec.lambda = random_lambda(3, 2.0, rng);
    spec.sigma = 1.2;
    ProductCache cache = build_product_cache(X, spec);
    Vector alpha(6);
    for (int i = 0; i < 6; ++i) alpha[i] = rnorm(rng);

    const int q = 1;
    CoordinateProfile prof = coordinate_profile(cache, q, alpha);
    for (int k = 0; k < 10; ++k) {
        const double lq = k * 0.35;
        KernelSpec at = spec;
        at.lambda[q] = lq;
        Matrix K = gram(X, X, at);
        Vector f = K * alpha;
        for (int j = 0; j < 6; ++j)
            CHECK(prof.a[j] + prof.b[j] * lq ==
                  doctest::Approx(f[j]).epsilon(1e-10));
        // alpha' K alpha = alpha' C alpha + v * lambda_q, with C the profile
        // at lambda_q = 0.
        KernelSpec base = spec;
        base.lambda[q] = 0.0;
        const double c0 = alpha.dot(gram(X, X, base) * alpha);
        CHECK(alpha.dot(f) == doctest::Approx(c0 + prof.v * lq).epsilon(1e-10));
    }
}

TEST_CASE("gram PSD and profile curvature nonnegative on random instances") {
    Rng rng(8);
    for (int rep = 0; rep < 50; ++rep) {
        const int n = 2 + static_cast<int>(runif(rng) * 49.0);
        const int p = 1 + static_cast<int>(runif(rng) * 4.0);
        Matrix X = random_matrix(n, p, rng);
        KernelSpec spec;
        spec.lambda = random_lambda(p, 3.0, rng);
        spec.sigma = 0.5 + runif(rng) * 2.0;
        Matrix K = gram(X, X, spec);
        Eigen::SelfAdjointEigenSolver<Matrix> eig(K);
        CHECK(eig.eigenvalues().minCoeff() >= -1e-8 * eig.eigenvalues().maxCoeff());

        ProductCache cache = build_product_cache(X, spec);
        Vector alpha(n);
        for (int i = 0; i < n; ++i) alpha[i] = rnorm(rng);
        for (int q = 0; q < p; ++q)
            CHECK(coordinate_profile(cache, q, alpha).v >= -1e-12);
    }
}
