#include "kernsel/kernel.hpp"

#include <algorithm>
#include <cmath>

#include "kernsel/errors.hpp"

namespace kernsel {

namespace {

constexpr double kOverflowLimit = 1e300;

void check_spec(const KernelSpec& spec, Eigen::Index p) {
    if (spec.lambda.size() != p)
        throw DimensionMismatch("kernel: lambda length does not match feature count");
    if (!(spec.sigma > 0.0) || !std::isfinite(spec.sigma))
        throw InvalidBandwidth("kernel: bandwidth must be positive and finite");
}

} // namespace

double gauss1d(double x, double y, double sigma) {
    if (!(sigma > 0.0)) throw InvalidBandwidth("gauss1d: bandwidth must be positive");
    double d = x - y;
    return std::exp(-d * d / (2.0 * sigma * sigma));
}

namespace {

// Median with a zero-distance fallback: a zero median falls back to the
// smallest nonzero distance, and all-zero distances are degenerate.
double median_distance(std::vector<double>& dist) {
    auto mid = dist.begin() + static_cast<std::ptrdiff_t>(dist.size() / 2);
    std::nth_element(dist.begin(), mid, dist.end());
    double median = *mid;
    if (dist.size() % 2 == 0) {
        // Even count: average the two middle order statistics.
        double below = *std::max_element(dist.begin(), mid);
        median = 0.5 * (below + median);
    }
    if (median > 0.0) return median;

    double smallest = std::numeric_limits<double>::infinity();
    for (double d : dist)
        if (d > 0.0) smallest = std::min(smallest, d);
    if (!std::isfinite(smallest))
        throw DegenerateData("median_bandwidth: all pairwise distances are zero");
    return smallest;
}

} // namespace

double median_bandwidth(const Matrix& X) {
    const Eigen::Index n = X.rows();
    if (n < 2) throw DegenerateData("median_bandwidth: need at least two rows");
    std::vector<double> dist;
    dist.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            dist.push_back((X.row(i) - X.row(j)).norm());
    return median_distance(dist);
}

Matrix gram(const Matrix& X, const Matrix& Z, const KernelSpec& spec) {
    if (X.cols() != Z.cols())
        throw DimensionMismatch("gram: X and Z must share a column count");
    check_spec(spec, X.cols());
    const Eigen::Index n = X.rows(), m = Z.rows(), p = X.cols();
    const double inv2s2 = 1.0 / (2.0 * spec.sigma * spec.sigma);
    Matrix K = Matrix::Ones(n, m);
    for (Eigen::Index f = 0; f < p; ++f) {
        const double lf = spec.lambda[f];
        if (lf == 0.0) continue;
        double maxval = 0.0;
        for (Eigen::Index j = 0; j < m; ++j) {
            const double zj = Z(j, f);
            for (Eigen::Index i = 0; i < n; ++i) {
                const double d = X(i, f) - zj;
                double e = K(i, j) * (1.0 + lf * std::exp(-d * d * inv2s2));
                K(i, j) = e;
                maxval = std::max(maxval, e);
            }
        }
        if (maxval > kOverflowLimit)
            throw Overflow("gram: kernel entry exceeded 1e300");
    }
    return K;
}

std::vector<Matrix> make_feature_blocks(const Matrix& X, double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw InvalidBandwidth("make_feature_blocks: bandwidth must be positive and finite");
    const Eigen::Index n = X.rows(), p = X.cols();
    const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
    std::vector<Matrix> blocks(static_cast<std::size_t>(p));
    for (Eigen::Index f = 0; f < p; ++f) {
        Matrix& G = blocks[static_cast<std::size_t>(f)];
        G.resize(n, n);
        for (Eigen::Index j = 0; j < n; ++j) {
            G(j, j) = 1.0;
            const double xj = X(j, f);
            for (Eigen::Index i = j + 1; i < n; ++i) {
                const double d = X(i, f) - xj;
                const double e = std::exp(-d * d * inv2s2);
                G(i, j) = e;
                G(j, i) = e;
            }
        }
    }
    return blocks;
}

const Matrix& ProductCache::block(int q) const {
    if (q < 0 || q >= p()) throw IndexOutOfRange("ProductCache: feature index out of range");
    return (*blocks)[static_cast<std::size_t>(q)];
}

void ProductCache::set_lambda(int q, double value) {
    const Matrix& G = block(q);
    const double lold = spec.lambda[q];
    if (value == lold) return;
    const Eigen::Index n2 = P.size();
    const double* g = G.data();
    double* ptr = P.data();
    double maxval = 0.0;
    for (Eigen::Index i = 0; i < n2; ++i) {
        double e = ptr[i] * ((1.0 + value * g[i]) / (1.0 + lold * g[i]));
        ptr[i] = e;
        maxval = std::max(maxval, e);
    }
    spec.lambda[q] = value;
    if (maxval > kOverflowLimit)
        throw Overflow("ProductCache: kernel entry exceeded 1e300");
}

void ProductCache::rebuild() {
    const Eigen::Index n2 = P.size();
    P.setOnes();
    double maxval = 1.0;
    for (int q = 0; q < p(); ++q) {
        const double lq = spec.lambda[q];
        if (lq == 0.0) continue;
        const double* g = block(q).data();
        double* ptr = P.data();
        maxval = 0.0;
        for (Eigen::Index i = 0; i < n2; ++i) {
            double e = ptr[i] * (1.0 + lq * g[i]);
            ptr[i] = e;
            maxval = std::max(maxval, e);
        }
    }
    if (maxval > kOverflowLimit)
        throw Overflow("ProductCache: kernel entry exceeded 1e300");
}

ProductCache build_product_cache(std::shared_ptr<const std::vector<Matrix>> blocks,
                                 const KernelSpec& spec) {
    if (!blocks) throw DimensionMismatch("build_product_cache: null block set");
    const auto p = static_cast<Eigen::Index>(blocks->size());
    check_spec(spec, p);
    ProductCache cache;
    cache.blocks = std::move(blocks);
    cache.spec = spec;
    const Eigen::Index n = p > 0 ? (*cache.blocks)[0].rows() : 0;
    cache.P.resize(n, n);
    cache.rebuild();
    return cache;
}

ProductCache build_product_cache(const Matrix& X, const KernelSpec& spec) {
    check_spec(spec, X.cols());
    auto blocks = std::make_shared<std::vector<Matrix>>(make_feature_blocks(X, spec.sigma));
    return build_product_cache(std::move(blocks), spec);
}

CoordinateProfile coordinate_profile(const ProductCache& cache, int q, const Vector& alpha) {
    const Matrix& G = cache.block(q);
    const Eigen::Index n = cache.P.rows();
    if (alpha.size() != n)
        throw DimensionMismatch("coordinate_profile: alpha length does not match cache");
    const double lq = cache.spec.lambda[q];
    CoordinateProfile out;
    out.a.resize(n);
    out.b.resize(n);
    const double* av = alpha.data();
    for (Eigen::Index j = 0; j < n; ++j) {
        const double* pc = cache.P.data() + j * n;
        const double* gc = G.data() + j * n;
        double aj = 0.0, bj = 0.0;
        if (lq == 0.0) {
            for (Eigen::Index i = 0; i < n; ++i) {
                const double c = pc[i];
                aj += av[i] * c;
                bj += av[i] * c * gc[i];
            }
        } else {
            for (Eigen::Index i = 0; i < n; ++i) {
                const double c = pc[i] / (1.0 + lq * gc[i]);
                aj += av[i] * c;
                bj += av[i] * c * gc[i];
            }
        }
        out.a[j] = aj;
        out.b[j] = bj;
    }
    out.v = alpha.dot(out.b);
    return out;
}

} // namespace kernsel
