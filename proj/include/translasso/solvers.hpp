#pragma once

#include <vector>

#include "translasso/linalg.hpp"

namespace translasso {

struct SolverConfig {
    // coordinate descent: stop a sweep phase when the largest coordinate
    // change falls below cd_tol, then require the subgradient residual to
    // reach kkt_tol before reporting convergence
    double cd_tol = 1e-9;
    double kkt_tol = 1e-8;
    std::size_t max_iter = 100000;  // CD sweeps, or simplex pivots
    // LP tolerances
    double feas_tol = 1e-9;
    double opt_tol = 1e-9;
    // record the objective after every CD sweep in FitResult::objective_trace
    bool track_objective = false;
};

enum class FitStatus { converged, max_iter, infeasible };

struct FitResult {
    Vector beta;
    double lambda = 0.0;
    std::size_t iterations = 0;
    double kkt_residual = 0.0;
    double objective = 0.0;
    FitStatus status = FitStatus::converged;
    Vector objective_trace;
};

// Penalty convention: the objective is ||y - X b||_2^2 + 2 lambda ||b||_1,
// with the raw (unscaled) residual sum of squares. Note this differs from
// glmnet, whose loss carries a 1/(2n) factor.
struct LassoProblem {
    Matrix design;
    Vector response;
    double lambda = 0.0;
};

// min ||b||_1  s.t.  ||X'(y - X b)||_inf <= lambda
struct DantzigProblem {
    Matrix design;
    Vector response;
    double lambda = 0.0;
};

// Column-major copy of a design plus its column norms. Lets many fits against
// the same design (a regularization path, or a grid of responses) share the
// cache-friendly layout.
class DesignCache {
  public:
    explicit DesignCache(const Matrix& design);

    std::size_t nrows() const { return nrows_; }
    std::size_t ncols() const { return ncols_; }
    const double* col(std::size_t j) const { return cols_.data() + j * nrows_; }
    double col_sq(std::size_t j) const { return col_sq_[j]; }

  private:
    std::size_t nrows_;
    std::size_t ncols_;
    std::vector<double> cols_;
    Vector col_sq_;
};

// Cyclic coordinate descent with exact per-coordinate minimization
// (soft-threshold updates) and active-set sweeps. Converged results satisfy
// the subgradient conditions of the 2-lambda convention:
//   b_j != 0  =>  X_j'(y - X b) = lambda * sign(b_j)   (within kkt_tol)
//   b_j == 0  =>  |X_j'(y - X b)| <= lambda + kkt_tol
// With lambda = 0 and a rank-deficient design the returned vector is the
// limit of the coordinate-descent iterates from the start point; the
// minimizer is not unique in that case.
FitResult lasso_fit(const LassoProblem& prob, const SolverConfig& cfg = {},
                    const Vector* warm_start = nullptr);

FitResult lasso_fit_cached(const DesignCache& design, const Vector& response, double lambda,
                           const SolverConfig& cfg = {}, const Vector* warm_start = nullptr);

// Fits along a decreasing lambda sequence, warm-starting each fit from the
// previous solution.
std::vector<FitResult> lasso_path(const Matrix& design, const Vector& response,
                                  const std::vector<double>& lambdas,
                                  const SolverConfig& cfg = {});

enum class LpStatus { optimal, infeasible, unbounded, max_iter };

struct LpResult {
    Vector x;
    double objective = 0.0;
    LpStatus status = LpStatus::optimal;
    std::size_t pivots = 0;
};

// Dense two-phase simplex for  min c'x  s.t.  A x <= b, x >= 0.
// Pivot selection uses Bland's rule (lowest eligible index), which prevents
// cycling and makes the solve deterministic.
LpResult lp_simplex(const Vector& c, const Matrix& a_ub, const Vector& b_ub,
                    const SolverConfig& cfg = {});

// Dantzig Selector via the LP reformulation with variables (b+, b-) >= 0:
//   min sum(b+ + b-)  s.t.  +-X'(y - X(b+ - b-)) <= lambda,
// recovering b = b+ - b-. An LP declared infeasible (possible numerically
// for lambda near 0 with an ill-conditioned Gram) surfaces as
// FitStatus::infeasible.
FitResult dantzig_fit(const DantzigProblem& prob, const SolverConfig& cfg = {});

double soft_threshold(double z, double t);

}  // namespace translasso
