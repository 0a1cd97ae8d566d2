#pragma once

#include <functional>

#include "translasso/solvers.hpp"

namespace translasso {

// Labeled design X (n x p) with response Y, plus the stacked design Z
// (m x p, first n rows equal to X) covering the unlabeled points. sigma is
// the known noise standard deviation of the model Y = X b* + eps.
struct RegressionDataset {
    Matrix X;
    Vector Y;
    Matrix Z;
    double sigma = 1.0;

    std::size_t n() const { return X.rows; }
    std::size_t m() const { return Z.rows; }
    std::size_t p() const { return X.cols; }
};

// Validates shapes, finiteness, sigma > 0 (sigma = 0 is allowed for
// noiseless synthetic data) and that Z starts with the rows of X.
RegressionDataset make_dataset(Matrix x, Vector y, Matrix z, double sigma);
// Convenience for m = n: Z is a copy of X.
RegressionDataset make_dataset(Matrix x, Vector y, double sigma);

// Is every column of X normalized to X_j'X_j / n = 1 (within tol)?
bool columns_normalized(const RegressionDataset& ds, double tol = 1e-8);

enum class Objective { transductive, denoising, estimation, custom };

// The q x p matrix defining what is being estimated:
//   transductive: A = sqrt(n/m) Z, denoising: A = X, estimation: A = sqrt(n) I.
// A is stored pre-scaled; experiment-facing errors are computed on the raw Z.
struct TargetSpec {
    Matrix A;
    Objective objective = Objective::denoising;
};

TargetSpec build_target(const RegressionDataset& ds, Objective objective,
                        const Matrix* custom = nullptr);

enum class PrelimMethod { pseudo_ls, ridge, lasso, identity_response };

// A preliminary estimate of A b*, living in the (scaled) A coordinates.
// For the lasso method, coef keeps the underlying coefficient vector so the
// lambda2 = 0 transductive fit can return it verbatim.
struct PreliminaryEstimate {
    Vector value;
    PrelimMethod method = PrelimMethod::pseudo_ls;
    double param = 0.0;  // gamma for ridge, lambda1 for lasso
    Vector coef;
    FitStatus solver_status = FitStatus::converged;
};

// A (X'X)^+ X'Y. Independent of the pseudo-inverse cutoff whenever
// Ker(A) is contained in Ker(X).
PreliminaryEstimate preliminary_pseudo_ls(const RegressionDataset& ds, const TargetSpec& spec,
                                          double tol = 1e-10);

// A (gamma A'A + X'X)^{-1} X'Y. gamma = 0 degenerates to the plain inverse
// and requires X'X invertible.
PreliminaryEstimate preliminary_ridge(const RegressionDataset& ds, const TargetSpec& spec,
                                      double gamma);

// A * lasso_fit(X, Y, lambda1).beta
PreliminaryEstimate preliminary_lasso(const RegressionDataset& ds, const TargetSpec& spec,
                                      double lambda1, const SolverConfig& cfg = {});

// Y itself as the estimate of X b*; only valid for the denoising target.
PreliminaryEstimate preliminary_identity(const RegressionDataset& ds, const TargetSpec& spec);

// Replaces the first n components of the (unscaled) Z-space estimate by the
// observed labels Y; the sqrt(n/m) scaling is reapplied. Idempotent, touches
// only coordinates 1..n. Requires a transductive target.
PreliminaryEstimate label_preserving_adjust(const RegressionDataset& ds, const TargetSpec& spec,
                                            PreliminaryEstimate prelim);

// argmin ||prelim - A b||_2^2 + 2 lambda2 ||b||_1. When lambda2 = 0 and the
// preliminary came from the lasso, the preliminary coefficient vector itself
// is returned: the plain LASSO is the lambda2 = 0 member of the family, which
// also pins the PERF ratios to [0, 1].
FitResult transductive_lasso(const RegressionDataset& ds, const TargetSpec& spec,
                             const PreliminaryEstimate& prelim, double lambda2,
                             const SolverConfig& cfg = {}, const Vector* warm_start = nullptr);

// min ||b||_1  s.t.  ||A'(prelim - A b)||_inf <= lambda2
FitResult transductive_dantzig(const RegressionDataset& ds, const TargetSpec& spec,
                               const PreliminaryEstimate& prelim, double lambda2,
                               const SolverConfig& cfg = {});

// Z_X = Z P with P = (X'X)^+ (X'X), the orthogonal projector onto the row
// space of X. Z_X annihilates Ker(X) and equals Z when X has full column
// rank; fits built on Z_X satisfy Ker(Z_X) = Ker(X).
Matrix project_onto_rowspace(const RegressionDataset& ds, double tol = 1e-10);

// P beta: the row-space representative of a coefficient vector. Fits against
// a Z_X target should be reported through this map; it leaves all Z_X (and
// A) predictions unchanged and makes (Z - Z_X) beta vanish.
Vector rowspace_representative(const RegressionDataset& ds, const Vector& beta,
                               double tol = 1e-10);

}  // namespace translasso
