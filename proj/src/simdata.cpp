#include "kernsel/simdata.hpp"

#include <cmath>
#include <string>

#include "kernsel/errors.hpp"

namespace kernsel {

namespace {

std::vector<std::string> default_names(int p) {
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(p));
    for (int m = 1; m <= p; ++m) names.push_back("x" + std::to_string(m));
    return names;
}

Matrix draw_features(int n, int p, const std::vector<CorrPair>& pairs, Rng& rng) {
    if (n == 0) return Matrix(0, p);
    return sample_correlated_gaussian(n, p, pairs, rng);
}

} // namespace

Vector study1_signal(const Matrix& X) {
    if (X.cols() < 5) throw InvalidDimension("study1_signal: needs at least 5 features");
    Vector s(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        const double x1 = X(i, 0), x2 = X(i, 1), x3 = X(i, 2), x4 = X(i, 3), x5 = X(i, 4);
        s[i] = 0.9 * x5 * x5 * x5 + 4.0 * x1 * x2 * x3 + 2.3 * std::exp(-x3) + 4.0 * x4;
    }
    return s;
}

SimInstance generate_study1(int n, int p, int n_valid, Rng& rng) {
    if (p < 5) throw InvalidDimension("generate_study1: needs p >= 5");
    if (n < 1 || n_valid < 0) throw InvalidDimension("generate_study1: bad sample sizes");
    const std::vector<CorrPair> pairs = {{0, 1, 0.4}, {0, 2, -0.3}, {1, 2, 0.5}, {2, 3, 0.2}};

    SimInstance inst;
    inst.study = Study::One;
    inst.true_support = {0, 1, 2, 3, 4};

    auto make = [&](int rows) {
        Dataset d;
        d.task = Task::Regression;
        d.feature_names = default_names(p);
        d.X = draw_features(rows, p, pairs, rng);
        Vector signal = rows > 0 ? study1_signal(d.X) : Vector(0);
        d.y.resize(rows);
        for (int i = 0; i < rows; ++i) d.y[i] = signal[i] + rnorm(rng);
        return d;
    };
    inst.train = make(n);
    inst.validation = make(n_valid);
    return inst;
}

SimInstance generate_study2(int n, int p, int n_valid, Rng& rng) {
    if (p < 4) throw InvalidDimension("generate_study2: needs p >= 4");
    if (n < 1 || n_valid < 0) throw InvalidDimension("generate_study2: bad sample sizes");
    // The generating model's second corr(x3,x4) listing is dropped as a
    // typo; the sampler's factorization verifies this matrix is positive
    // definite.
    const std::vector<CorrPair> pairs = {{0, 1, -0.2}, {0, 3, 0.2}, {1, 2, 0.5}, {2, 3, 0.3}};

    SimInstance inst;
    inst.study = Study::Two;
    inst.true_support = {1, 2, 3};

    auto make = [&](int rows) {
        Dataset d;
        d.task = Task::Classification;
        d.feature_names = default_names(p);
        d.X = draw_features(rows, p, pairs, rng);
        d.y.resize(rows);
        for (int i = 0; i < rows; ++i) {
            const double t = d.X(i, 1) - 1.1 * d.X(i, 2) + 0.3 * d.X(i, 3);
            const double prob_pos = 1.0 / (1.0 + std::exp(-0.25 + t * t * t));
            d.y[i] = runif(rng) < prob_pos ? 1.0 : -1.0;
        }
        return d;
    };
    inst.train = make(n);
    inst.validation = make(n_valid);
    return inst;
}

} // namespace kernsel
