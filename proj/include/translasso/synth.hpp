#pragma once

#include "translasso/estimators.hpp"

namespace translasso {

// Synthetic problem family: m i.i.d. AR(1) design rows with correlation
// rho^|j-k|, the first n rows labeled through Y = X b* + eps with
// eps ~ N(0, sigma2), and b* having its s leading entries equal to
// beta_value (5 by default). Everything is a pure function of the seed.
struct SynthConfig {
    std::size_t p = 8;
    std::size_t s = 1;
    std::size_t n = 10;
    std::size_t m = 30;
    double rho = 0.1;
    double sigma2 = 1.0;
    double beta_value = 5.0;
    std::uint64_t seed = 0;
};

struct SynthProblem {
    RegressionDataset ds;
    Vector beta_star;
};

void validate(const SynthConfig& cfg);

// Draws Z row by row, takes X as the first n rows, then draws the noise.
// With normalize = true the columns of X (and, with the same factors, Z) are
// rescaled to X_j'X_j/n = 1 before Y is drawn, so the model holds with the
// unchanged b* in the normalized coordinates. The raw flavor is what the
// replication experiments use; the bound/check flows normalize.
SynthProblem generate(const SynthConfig& cfg, bool normalize = false);

struct NormalizeResult {
    RegressionDataset ds;
    Vector scale;  // factor applied to each column
};

// Rescales each column of X to X_j'X_j/n = 1 and applies the same per-column
// factors to Z (the scales come from X, not from Z). Y and sigma are left
// untouched. Throws on a zero column.
NormalizeResult normalize_columns(const RegressionDataset& ds);

}  // namespace translasso
