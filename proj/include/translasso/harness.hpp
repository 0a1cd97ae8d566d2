#pragma once

#include "translasso/synth.hpp"

namespace translasso {

// Descending lambda values, log-spaced from lambda_max down to
// eps * lambda_max, with 0 appended so the unpenalized fit (and, for the
// transductive family, the plain LASSO) is part of every path.
struct LambdaGrid {
    std::vector<double> values;
};

// lambda_max = ||design' response||_inf, the smallest lambda with a zero
// solution under the 2-lambda convention. A zero response collapses the grid
// to {0}.
LambdaGrid build_lambda_grid(const Matrix& design, const Vector& response, std::size_t k = 100,
                             double eps = 1e-3);

struct GridParams {
    std::size_t k = 100;
    double eps = 1e-3;
    // fit only ~k1 of the lambda1 values (plus lambda1 = 0); the minimum over
    // (lambda1, lambda2) barely depends on lambda1, so this trades little
    // accuracy for a k/k1 speedup
    bool coarse_lambda1 = false;
    std::size_t k1 = 10;
};

// One replication's oracle-tuned error ratios. Each PERF is
//   min over (lambda1, lambda2) of the transductive error
//   / min over lambda of the LASSO error,
// measured against the true coefficients; both families share the lambda2 = 0
// tie-break, so every ratio is <= 1.
struct PerfRecord {
    std::size_t replication_index = 0;
    std::uint64_t seed = 0;
    double perf_z = 1.0, perf_x = 1.0, perf_i = 1.0;
    // oracle LASSO tuning per objective
    double lasso_lambda_z = 0.0, lasso_lambda_x = 0.0, lasso_lambda_i = 0.0;
    // oracle transductive tuning per objective
    double tl_lambda1_z = 0.0, tl_lambda2_z = 0.0;
    double tl_lambda1_x = 0.0, tl_lambda2_x = 0.0;
    double tl_lambda1_i = 0.0, tl_lambda2_i = 0.0;
    std::size_t failed_cells = 0;  // solver cells excluded (warned, never silent)
};

// Generates one dataset (seed = cfg.seed + replication_index), fits the
// warm-started LASSO path, then for each lambda1 the transductive LASSO path
// with the label-preserving LASSO preliminary, and records the oracle ratios.
PerfRecord run_replication(const SynthConfig& cfg, const GridParams& grid,
                           const SolverConfig& solver_cfg = {}, std::size_t replication_index = 0);

// Runs replications 0..count-1 on a worker pool. Records are merged by
// replication index, so the output does not depend on the thread count, and
// extending the replication count leaves earlier records bit-identical.
std::vector<PerfRecord> run_experiment(const SynthConfig& cfg, std::size_t count,
                                       const GridParams& grid, const SolverConfig& solver_cfg = {},
                                       std::size_t threads = 0);

struct PerfStats {
    double mean = 0.0;
    double median = 0.0;
    double q03 = 0.0;  // quantile of order 0.3, as in the result tables
};

struct PerfSummary {
    PerfStats z, x, i;
    std::size_t replications = 0;
};

// Mean plus interpolated median / 0.3-quantile; invariant under record order.
PerfSummary aggregate(const std::vector<PerfRecord>& records);

struct ErrorCurveRow {
    double lambda = 0.0;
    double denoise_err = 0.0;    // (1/n) ||X(b - b*)||^2
    double transduct_err = 0.0;  // (1/m) ||Z(b - b*)||^2
    bool support_correct = false;
};

// Error-versus-lambda table for the LASSO path, with the two argmin lambdas
// (they usually differ) reported alongside.
struct ErrorCurve {
    std::vector<ErrorCurveRow> rows;
    double argmin_denoise_lambda = 0.0;
    double argmin_transduct_lambda = 0.0;
};

ErrorCurve emit_error_curve(const RegressionDataset& ds, const Vector& beta_star,
                            const LambdaGrid& grid, const SolverConfig& solver_cfg = {});

}  // namespace translasso
