#include "kernsel/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "kernsel/errors.hpp"

namespace kernsel {

namespace {

double median_of(std::vector<double> v) {
    const std::size_t half = v.size() / 2;
    auto mid = v.begin() + static_cast<std::ptrdiff_t>(half);
    std::nth_element(v.begin(), mid, v.end());
    double m = *mid;
    if (v.size() % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), mid));
    return m;
}

} // namespace

std::vector<int> selected_features(const Vector& lambda, double threshold) {
    std::vector<int> out;
    for (Eigen::Index m = 0; m < lambda.size(); ++m)
        if (lambda[m] > threshold) out.push_back(static_cast<int>(m));
    return out;
}

SelectionReport selection_metrics(const Vector& lambda_hat, double threshold,
                                  const std::vector<int>& true_support, int p) {
    if (lambda_hat.size() != p)
        throw DimensionMismatch("selection_metrics: lambda length does not match p");
    if (true_support.empty()) throw EmptySupport("selection_metrics: empty true support");

    std::vector<bool> important(static_cast<std::size_t>(p), false);
    for (int m : true_support) {
        if (m < 0 || m >= p) throw IndexOutOfRange("selection_metrics: support index out of range");
        important[static_cast<std::size_t>(m)] = true;
    }

    int true_pos = 0, true_neg = 0, n_important = 0, n_selected = 0;
    for (int m = 0; m < p; ++m) {
        const bool selected = lambda_hat[m] > threshold;
        if (selected) ++n_selected;
        if (important[static_cast<std::size_t>(m)]) {
            ++n_important;
            if (selected) ++true_pos;
        } else if (!selected) {
            ++true_neg;
        }
    }

    SelectionReport report;
    report.n_selected = n_selected;
    report.tpr = static_cast<double>(true_pos) / static_cast<double>(n_important);
    const int n_unimportant = p - n_important;
    report.tnr =
        n_unimportant > 0 ? static_cast<double>(true_neg) / static_cast<double>(n_unimportant) : 1.0;
    return report;
}

double prediction_metrics(Task task, const Vector& predictions, const Vector& y_true) {
    if (predictions.size() != y_true.size())
        throw DimensionMismatch("prediction_metrics: length mismatch");
    const auto n = predictions.size();
    if (n == 0) throw DegenerateData("prediction_metrics: empty input");
    if (task == Task::Regression) return (predictions - y_true).squaredNorm() / static_cast<double>(n);
    int wrong = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
        if (y_true[j] != 1.0 && y_true[j] != -1.0)
            throw InvalidLabel("prediction_metrics: labels must be -1 or +1");
        const double label = predictions[j] >= 0.0 ? 1.0 : -1.0; // sign(0) -> +1
        if (label != y_true[j]) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(n);
}

BenchmarkSummary summarize(const std::vector<SelectionReport>& reports) {
    if (reports.empty()) throw DegenerateData("summarize: no replicates");
    BenchmarkSummary s;
    s.replicates = static_cast<int>(reports.size());
    std::vector<double> errors;
    errors.reserve(reports.size());
    for (const auto& r : reports) {
        s.mean_tpr += r.tpr;
        s.mean_tnr += r.tnr;
        s.mean_selected += r.n_selected;
        s.mean_error += r.pred_error;
        errors.push_back(r.pred_error);
    }
    const double inv = 1.0 / static_cast<double>(s.replicates);
    s.mean_tpr *= inv;
    s.mean_tnr *= inv;
    s.mean_selected *= inv;
    s.mean_error *= inv;
    const double med = median_of(errors);
    for (double& e : errors) e = std::abs(e - med);
    s.mad_error = median_of(errors);
    return s;
}

} // namespace kernsel
