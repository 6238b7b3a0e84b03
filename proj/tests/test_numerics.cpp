#include <doctest.h>

#include <cmath>
#include <vector>

#include "kernsel/errors.hpp"
#include "kernsel/numerics.hpp"
#include "kernsel/rng.hpp"

using namespace kernsel;

namespace {

Matrix random_spd(int n, Rng& rng) {
    Matrix B(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) B(i, j) = rnorm(rng);
    Matrix A = B * B.transpose();
    A.diagonal().array() += 0.1;
    return A;
}

double solve_residual(const Matrix& A, const Vector& x, const Vector& b) {
    return (A * x - b).norm() / (A.norm() * x.norm() + b.norm());
}

} // namespace

TEST_CASE("solve_spd: identity system") {
    Matrix A = Matrix::Identity(3, 3);
    Vector b(3);
    b << 1, 2, 3;
    Vector x = solve_spd(A, b);
    CHECK(x.isApprox(b, 1e-14));
}

TEST_CASE("solve_spd: diagonal system") {
    Matrix A(2, 2);
    A << 4, 0, 0, 2;
    Vector b(2);
    b << 8, 2;
    Vector x = solve_spd(A, b);
    CHECK(x[0] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(x[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("solve_spd: rank-1 all-ones system solved under jitter") {
    Matrix A = Matrix::Ones(3, 3);
    Vector b = Vector::Ones(3);
    Vector x = solve_spd(A, b);
    CHECK((A * x - b).norm() <= 1e-8 * (A.norm() * x.norm() + b.norm()));
}

TEST_CASE("solve_spd: residual bound on random SPD systems") {
    Rng rng(71);
    for (int rep = 0; rep < 100; ++rep) {
        const int n = 2 + static_cast<int>(runif(rng) * 49.0);
        Matrix A = random_spd(n, rng);
        Vector b(n);
        for (int i = 0; i < n; ++i) b[i] = rnorm(rng);
        Vector x = solve_spd(A, b);
        CHECK(solve_residual(A, x, b) <= 1e-8);
    }
}

TEST_CASE("solve_spd: shape and indefiniteness errors") {
    Matrix A = Matrix::Identity(3, 3);
    Vector b = Vector::Ones(2);
    CHECK_THROWS_AS(solve_spd(A, b), DimensionMismatch);

    // Indefinite matrix (eigenvalues 3 and -1): no jitter below the policy
    // ceiling can cure it.
    Matrix M(2, 2);
    M << 1, 2, 2, 1;
    CHECK_THROWS_AS(solve_spd(M, Vector::Ones(2)), NonPsd);
}

TEST_CASE("minimize_convex_1d: quadratic vertex") {
    auto deriv = [](double t) { return 2.0 * (t - 2.0); };
    CHECK(minimize_convex_1d(deriv, 0.0, 10.0) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("minimize_convex_1d: monotone function pins the boundary exactly") {
    auto deriv = [](double) { return 1.0; }; // g(t) = t
    CHECK(minimize_convex_1d(deriv, 0.0, 5.0) == 0.0);
    auto deriv_down = [](double) { return -1.0; };
    CHECK(minimize_convex_1d(deriv_down, 0.0, 5.0) == 5.0);
}

TEST_CASE("minimize_convex_1d: exp(t) - 3t stationary at ln 3") {
    auto deriv = [](double t) { return std::exp(t) - 3.0; };
    CHECK(minimize_convex_1d(deriv, 0.0, 5.0) == doctest::Approx(std::log(3.0)).epsilon(1e-6));
}

TEST_CASE("minimize_convex_1d: interval and tolerance validation") {
    auto deriv = [](double t) { return t; };
    CHECK_THROWS_AS(minimize_convex_1d(deriv, 1.0, 1.0), InvalidInterval);
    CHECK_THROWS_AS(minimize_convex_1d(deriv, 2.0, 1.0), InvalidInterval);
    CHECK_THROWS_AS(minimize_convex_1d(deriv, 0.0, 1.0, 0.0), InvalidInterval);
}

TEST_CASE("minimize_convex_1d: matches fine grid scan on random convex quadratics") {
    Rng rng(12);
    for (int rep = 0; rep < 50; ++rep) {
        const double c = runif(rng) * 4.0 - 1.0; // vertex, possibly outside the box
        const double s = 0.5 + runif(rng) * 3.0; // curvature
        auto g = [&](double t) { return s * (t - c) * (t - c); };
        auto deriv = [&](double t) { return 2.0 * s * (t - c); };
        const double found = minimize_convex_1d(deriv, 0.0, 2.0);
        double best = g(0.0);
        for (int k = 0; k <= 20000; ++k) best = std::min(best, g(k * 1e-4));
        CHECK(g(found) <= best + 1e-8);
    }
}

TEST_CASE("minimize_convex_1d_values: derivative-free fallback") {
    auto g = [](double t) { return (t - 2.0) * (t - 2.0); };
    CHECK(minimize_convex_1d_values(g, 0.0, 10.0) == doctest::Approx(2.0).epsilon(1e-5));
    auto lin = [](double t) { return t; };
    CHECK(minimize_convex_1d_values(lin, 0.0, 5.0) == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("sample_correlated_gaussian: deterministic given the seed") {
    Rng a(9), b(9);
    Matrix X1 = sample_correlated_gaussian(4, 3, {}, a);
    Matrix X2 = sample_correlated_gaussian(4, 3, {}, b);
    CHECK(X1 == X2);
}

TEST_CASE("sample_correlated_gaussian: study-1 correlation pairs are accepted") {
    Rng rng(5);
    const std::vector<CorrPair> pairs = {{0, 1, 0.4}, {0, 2, -0.3}, {1, 2, 0.5}, {2, 3, 0.2}};
    Matrix X = sample_correlated_gaussian(50, 6, pairs, rng);
    CHECK(X.rows() == 50);
    CHECK(X.cols() == 6);
    CHECK(X.allFinite());
}

TEST_CASE("sample_correlated_gaussian: singular correlation rejected") {
    Rng rng(5);
    CHECK_THROWS_AS(sample_correlated_gaussian(4, 3, {{0, 1, 1.0}}, rng), NotPositiveDefinite);
}

TEST_CASE("sample_correlated_gaussian: bad pair index rejected") {
    Rng rng(5);
    CHECK_THROWS_AS(sample_correlated_gaussian(4, 3, {{0, 3, 0.5}}, rng), IndexOutOfRange);
}

TEST_CASE("sample_correlated_gaussian: empirical correlations near targets") {
    Rng rng(2024);
    const std::vector<CorrPair> pairs = {{0, 1, 0.4}, {0, 2, -0.3}, {1, 2, 0.5}, {2, 3, 0.2}};
    const int n = 20000;
    Matrix X = sample_correlated_gaussian(n, 5, pairs, rng);
    auto corr = [&](int i, int j) {
        Vector xi = X.col(i).array() - X.col(i).mean();
        Vector xj = X.col(j).array() - X.col(j).mean();
        return xi.dot(xj) / (xi.norm() * xj.norm());
    };
    for (const CorrPair& pr : pairs) CHECK(std::abs(corr(pr.i, pr.j) - pr.rho) <= 0.03);
    CHECK(std::abs(corr(3, 4)) <= 0.03); // unlisted pair stays near zero
    for (int m = 0; m < 5; ++m) {
        CHECK(std::abs(X.col(m).mean()) <= 0.03);
        const double var = (X.col(m).array() - X.col(m).mean()).square().sum() / (n - 1);
        CHECK(std::abs(var - 1.0) <= 0.05);
    }
}
