#pragma once

#include <vector>

#include "kernsel/dataset.hpp"
#include "kernsel/rng.hpp"

namespace kernsel {

enum class Study { One, Two };

// A synthetic train/validation pair with the generating support known
// (0-based feature indices).
struct SimInstance {
    Dataset train;
    Dataset validation;
    std::vector<int> true_support;
    Study study = Study::One;
};

// Noiseless regression surface of study 1 evaluated on each row:
//   0.9 x5^3 + 4 x1 x2 x3 + 2.3 exp(-x3) + 4 x4   (features numbered from 1).
Vector study1_signal(const Matrix& X);

// Regression design: correlated Gaussian features with
// corr(x1,x2)=.4, corr(x1,x3)=-.3, corr(x2,x3)=.5, corr(x3,x4)=.2, the rest
// independent; outcome = study1_signal + N(0,1) noise. Support is features
// 1-5. Throws InvalidDimension if p < 5.
SimInstance generate_study1(int n, int p, int n_valid, Rng& rng);

// Classification design: corr(x1,x2)=-.2, corr(x1,x4)=.2, corr(x2,x3)=.5,
// corr(x3,x4)=.3; labels drawn with
//   P(y=+1) = 1 / (1 + exp(-0.25 + (x2 - 1.1 x3 + 0.3 x4)^3)).
// Support is features 2-4. Throws InvalidDimension if p < 4.
SimInstance generate_study2(int n, int p, int n_valid, Rng& rng);

} // namespace kernsel
