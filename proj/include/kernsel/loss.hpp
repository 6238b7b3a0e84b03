#pragma once

#include "kernsel/numerics.hpp"

namespace kernsel {

// Regression pairs with squared loss (y - f)^2; Classification with the
// exponential margin loss exp(-y f), y in {-1, +1}.
enum class Task { Regression, Classification };

// Per-observation weights with mean 1. Regression uses all-ones; the
// classification weights balance the classes.
struct ObservationWeights {
    Vector w;

    static ObservationWeights uniform(int n);
    // w_j = n / (2 n+) for positives, n / (2 n-) for negatives, so each class
    // contributes total weight n/2. Throws DegenerateData if a class is
    // empty, InvalidLabel for labels outside {-1, +1}.
    static ObservationWeights balanced(const Vector& y);
};

// Weighted empirical risk n^{-1} sum_j w_j l(y_j, f_j). Exponential-loss
// exponents are clamped at 700; a clamp sets *clamped when provided.
// Throws InvalidLabel for classification labels outside {-1, +1},
// DimensionMismatch on length disagreement.
double loss_value(Task task, const ObservationWeights& w, const Vector& y, const Vector& f,
                  bool* clamped = nullptr);

// Weighted first and second derivatives in f: g_j = w_j dl/df,
// h_j = w_j d2l/df2 (all h_j > 0). Same clamping and errors as loss_value.
struct LossDerivatives {
    Vector g;
    Vector h;
};
LossDerivatives loss_derivatives(Task task, const ObservationWeights& w, const Vector& y,
                                 const Vector& f, bool* clamped = nullptr);

// exp(e) with the exponent clamped at 700 to keep early Newton iterations
// finite; sets *clamped when the clamp engages.
inline double safe_exp(double e, bool* clamped = nullptr) {
    if (e > 700.0) {
        if (clamped) *clamped = true;
        e = 700.0;
    }
    return std::exp(e);
}

} // namespace kernsel
