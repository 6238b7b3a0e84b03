#pragma once

#include <vector>

#include "kernsel/dataset.hpp"
#include "kernsel/rng.hpp"
#include "kernsel/solver.hpp"

namespace kernsel {

// Cross-validation grid for (gamma1, gamma2), values sorted ascending.
struct TuningGrid {
    std::vector<double> gamma1_values;
    std::vector<double> gamma2_values;
    int folds = 3;

    // Dyadic ladder 2^e over the odd exponents -15, -13, ..., 15 for both
    // parameters; the coarse variant keeps every other exponent
    // (-15, -11, ..., 13) to quarter the cell count.
    static TuningGrid dyadic(bool coarse = false, int folds = 3);
};

struct CvResult {
    double best_gamma1 = 0.0;
    double best_gamma2 = 0.0;
    FittedModel model;          // refit on all data at the winning cell
    Matrix cv_table;            // mean held-out score, gamma1 x gamma2
    std::vector<Matrix> fold_scores; // per-fold score tables behind cv_table
    double sigma = 0.0;         // bandwidth shared by every cell
};

// K-fold cross-validation over the grid: folds come from one seeded shuffle
// (stratified by label for classification), sigma is fixed once on the full
// data, and each cell's score averages held-out squared error (regression)
// or misclassification rate (classification) over folds. The minimum mean
// score wins; ties prefer larger gamma2, then larger gamma1. Cells whose
// fits fail numerically (e.g. Overflow) score +infinity rather than
// aborting the search. Throws DegenerateData when n < folds or when some
// training fold would lack a class.
CvResult cross_validate(const Dataset& data, const TuningGrid& grid, const FitConfig& base,
                        Rng& rng, int workers = 1);

} // namespace kernsel
