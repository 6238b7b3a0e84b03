#pragma once

#include <string>
#include <vector>

#include "kernsel/loss.hpp"
#include "kernsel/numerics.hpp"

namespace kernsel {

// Per-feature affine map (x - mean) / scale recorded at ingestion so that
// prediction-time inputs can be put on the training scale. Empty vectors
// mean no transformation was applied.
struct Standardization {
    Vector mean;
    Vector scale;

    bool active() const { return mean.size() > 0; }

    Matrix apply(const Matrix& raw) const {
        if (!active()) return raw;
        Matrix out = raw;
        for (Eigen::Index m = 0; m < out.cols(); ++m)
            out.col(m) = (out.col(m).array() - mean[m]) / scale[m];
        return out;
    }
};

// A supervised learning problem: features by row, one outcome per row.
// Classification outcomes are coded -1 / +1.
struct Dataset {
    Matrix X;
    Vector y;
    Task task = Task::Regression;
    std::vector<std::string> feature_names;
    Standardization standardization;

    int n() const { return static_cast<int>(X.rows()); }
    int p() const { return static_cast<int>(X.cols()); }
};

} // namespace kernsel
