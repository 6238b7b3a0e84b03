#include "kernsel/loss.hpp"

#include <cmath>

#include "kernsel/errors.hpp"

namespace kernsel {

namespace {

void check_labels(const Vector& y) {
    for (Eigen::Index j = 0; j < y.size(); ++j)
        if (y[j] != 1.0 && y[j] != -1.0)
            throw InvalidLabel("classification labels must be -1 or +1");
}

void check_lengths(const ObservationWeights& w, const Vector& y, const Vector& f) {
    if (y.size() != f.size() || w.w.size() != y.size())
        throw DimensionMismatch("loss: weight, label, and fit lengths must agree");
}

} // namespace

ObservationWeights ObservationWeights::uniform(int n) {
    if (n < 1) throw DimensionMismatch("ObservationWeights: n must be positive");
    return {Vector::Ones(n)};
}

ObservationWeights ObservationWeights::balanced(const Vector& y) {
    check_labels(y);
    const auto n = y.size();
    Eigen::Index npos = 0;
    for (Eigen::Index j = 0; j < n; ++j)
        if (y[j] > 0.0) ++npos;
    const Eigen::Index nneg = n - npos;
    if (npos == 0 || nneg == 0)
        throw DegenerateData("balanced weights need both classes present");
    ObservationWeights out;
    out.w.resize(n);
    const double wpos = static_cast<double>(n) / (2.0 * static_cast<double>(npos));
    const double wneg = static_cast<double>(n) / (2.0 * static_cast<double>(nneg));
    for (Eigen::Index j = 0; j < n; ++j) out.w[j] = y[j] > 0.0 ? wpos : wneg;
    return out;
}

double loss_value(Task task, const ObservationWeights& w, const Vector& y, const Vector& f,
                  bool* clamped) {
    check_lengths(w, y, f);
    const auto n = y.size();
    if (n == 0) return 0.0;
    double total = 0.0;
    if (task == Task::Regression) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double r = y[j] - f[j];
            total += w.w[j] * r * r;
        }
    } else {
        check_labels(y);
        for (Eigen::Index j = 0; j < n; ++j)
            total += w.w[j] * safe_exp(-y[j] * f[j], clamped);
    }
    return total / static_cast<double>(n);
}

LossDerivatives loss_derivatives(Task task, const ObservationWeights& w, const Vector& y,
                                 const Vector& f, bool* clamped) {
    check_lengths(w, y, f);
    const auto n = y.size();
    LossDerivatives out;
    out.g.resize(n);
    out.h.resize(n);
    if (task == Task::Regression) {
        for (Eigen::Index j = 0; j < n; ++j) {
            out.g[j] = w.w[j] * 2.0 * (f[j] - y[j]);
            out.h[j] = w.w[j] * 2.0;
        }
    } else {
        check_labels(y);
        for (Eigen::Index j = 0; j < n; ++j) {
            const double e = safe_exp(-y[j] * f[j], clamped);
            out.g[j] = w.w[j] * -y[j] * e;
            out.h[j] = w.w[j] * e;
        }
    }
    return out;
}

} // namespace kernsel
