#include "kernsel/numerics.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "kernsel/errors.hpp"

namespace kernsel {

namespace {

bool residual_ok(const Matrix& A, const Vector& x, const Vector& b) {
    if (!x.allFinite()) return false;
    double res = (A * x - b).norm();
    return res <= 1e-8 * (A.norm() * x.norm() + b.norm());
}

} // namespace

Vector solve_spd(const Matrix& A, const Vector& b, const JitterPolicy& policy) {
    if (A.rows() != A.cols())
        throw DimensionMismatch("solve_spd: matrix is not square");
    if (b.size() != A.rows())
        throw DimensionMismatch("solve_spd: rhs length does not match matrix order");
    if (A.rows() == 0) return Vector(0);

    double scale = A.diagonal().cwiseAbs().mean();
    if (scale <= 0.0 || !std::isfinite(scale)) scale = 1.0;

    Eigen::LLT<Matrix> llt;
    double jitter = 0.0;
    for (;;) {
        if (jitter == 0.0) {
            llt.compute(A);
        } else {
            Matrix Aj = A;
            Aj.diagonal().array() += jitter;
            llt.compute(Aj);
        }
        if (llt.info() == Eigen::Success) {
            Vector x = llt.solve(b);
            if (residual_ok(A, x, b)) return x;
        }
        if (jitter == 0.0) {
            jitter = policy.initial_jitter * scale;
        } else {
            jitter *= policy.growth_factor;
        }
        if (jitter > policy.max_jitter * scale || jitter <= 0.0)
            throw NonPsd("solve_spd: factorization failed at maximum jitter");
    }
}

double minimize_convex_1d(const std::function<double(double)>& deriv,
                          double lo, double hi, double tol) {
    if (!(lo < hi)) throw InvalidInterval("minimize_convex_1d: requires lo < hi");
    if (!(tol > 0.0)) throw InvalidInterval("minimize_convex_1d: requires tol > 0");
    // Convexity makes the derivative nondecreasing, so a sign at an endpoint
    // settles the whole interval.
    if (deriv(lo) >= 0.0) return lo;
    if (deriv(hi) <= 0.0) return hi;
    double a = lo, c = hi;
    while (c - a > tol) {
        double mid = 0.5 * (a + c);
        if (mid <= a || mid >= c) break; // bracket at floating-point resolution
        double d = deriv(mid);
        if (d == 0.0) return mid;
        (d < 0.0 ? a : c) = mid;
    }
    return 0.5 * (a + c);
}

double minimize_convex_1d_values(const std::function<double(double)>& g,
                                 double lo, double hi, double tol) {
    if (!(lo < hi)) throw InvalidInterval("minimize_convex_1d_values: requires lo < hi");
    if (!(tol > 0.0)) throw InvalidInterval("minimize_convex_1d_values: requires tol > 0");
    constexpr double invphi = 0.6180339887498949; // 1/golden ratio
    double a = lo, c = hi;
    double x1 = c - invphi * (c - a);
    double x2 = a + invphi * (c - a);
    double g1 = g(x1), g2 = g(x2);
    while (c - a > tol) {
        if (g1 <= g2) {
            c = x2;
            x2 = x1;
            g2 = g1;
            x1 = c - invphi * (c - a);
            if (x1 <= a || x1 >= x2) break;
            g1 = g(x1);
        } else {
            a = x1;
            x1 = x2;
            g1 = g2;
            x2 = a + invphi * (c - a);
            if (x2 <= x1 || x2 >= c) break;
            g2 = g(x2);
        }
    }
    double mid = 0.5 * (a + c);
    double best = a;
    double gbest = g(a);
    for (double cand : {mid, c}) {
        double gc = g(cand);
        if (gc < gbest) {
            gbest = gc;
            best = cand;
        }
    }
    return best;
}

Matrix sample_correlated_gaussian(int n, int p, const std::vector<CorrPair>& pairs, Rng& rng) {
    if (n < 1 || p < 1)
        throw DimensionMismatch("sample_correlated_gaussian: n and p must be positive");
    Matrix R = Matrix::Identity(p, p);
    for (const auto& pr : pairs) {
        if (pr.i < 0 || pr.i >= p || pr.j < 0 || pr.j >= p || pr.i == pr.j)
            throw IndexOutOfRange("sample_correlated_gaussian: bad correlation pair index");
        R(pr.i, pr.j) = pr.rho;
        R(pr.j, pr.i) = pr.rho;
    }
    Eigen::LLT<Matrix> llt(R);
    if (llt.info() != Eigen::Success)
        throw NotPositiveDefinite("sample_correlated_gaussian: correlation matrix is not positive definite");
    Matrix L = llt.matrixL();
    // Row-major draw order keeps the stream layout independent of p-loops
    // elsewhere; X = Z L' gives each row covariance L L' = R.
    Matrix Z(n, p);
    for (int i = 0; i < n; ++i)
        for (int m = 0; m < p; ++m) Z(i, m) = rnorm(rng);
    return Z * L.transpose();
}

} // namespace kernsel
