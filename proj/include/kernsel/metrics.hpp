#pragma once

#include <vector>

#include "kernsel/loss.hpp"
#include "kernsel/numerics.hpp"

namespace kernsel {

// Selection quality of one fitted lambda vector plus its held-out
// prediction error.
struct SelectionReport {
    double tpr = 0.0;      // selected fraction of the true support
    double tnr = 0.0;      // excluded fraction of its complement
    int n_selected = 0;
    double pred_error = 0.0;
};

// 0-based indices with lambda_m > threshold.
std::vector<int> selected_features(const Vector& lambda, double threshold);

// Counts selected = {m : lambda_m > threshold} against a 0-based true
// support. tnr is 1 when the complement is empty. Throws EmptySupport for an
// empty support, IndexOutOfRange / DimensionMismatch on bad inputs.
// pred_error in the result is left at 0 for the caller to fill.
SelectionReport selection_metrics(const Vector& lambda_hat, double threshold,
                                  const std::vector<int>& true_support, int p);

// Regression: mean squared error. Classification: misclassification rate of
// sign(prediction) vs. the -1/+1 label, with sign(0) read as +1.
double prediction_metrics(Task task, const Vector& predictions, const Vector& y_true);

// Replicate aggregates in the shape of the benchmark tables: means for
// rates and counts, mean plus median absolute deviation for the error.
struct BenchmarkSummary {
    int replicates = 0;
    double mean_tpr = 0.0;
    double mean_tnr = 0.0;
    double mean_selected = 0.0;
    double mean_error = 0.0;
    double mad_error = 0.0;
};

BenchmarkSummary summarize(const std::vector<SelectionReport>& reports);

} // namespace kernsel
