#include "translasso/harness.hpp"

#include <atomic>
#include <cmath>
#include <iostream>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace translasso {

LambdaGrid build_lambda_grid(const Matrix& design, const Vector& response, std::size_t k,
                             double eps) {
    if (k < 2) throw std::invalid_argument("build_lambda_grid: K must be >= 2");
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("build_lambda_grid: eps in (0,1)");
    const double lmax = norm_inf(matvec_t(design, response));
    LambdaGrid grid;
    if (lmax <= 0.0) {
        grid.values = {0.0};
        return grid;
    }
    grid.values.reserve(k + 1);
    for (std::size_t i = 0; i < k; ++i)
        grid.values.push_back(lmax * std::pow(eps, static_cast<double>(i) /
                                                       static_cast<double>(k - 1)));
    grid.values.push_back(0.0);
    return grid;
}

namespace {

struct ObjectiveErrors {
    double z = 0.0, x = 0.0, i = 0.0;
};

// Tracks the oracle minimum per objective together with its tuning.
struct Oracle {
    double err = std::numeric_limits<double>::infinity();
    double lam1 = 0.0, lam2 = 0.0;

    void offer(double e, double l1, double l2) {
        if (e < err) {
            err = e;
            lam1 = l1;
            lam2 = l2;
        }
    }
};

}  // namespace

PerfRecord run_replication(const SynthConfig& cfg, const GridParams& grid,
                           const SolverConfig& solver_cfg, std::size_t replication_index) {
    SynthConfig rep_cfg = cfg;
    rep_cfg.seed = cfg.seed + replication_index;
    const SynthProblem prob = generate(rep_cfg);
    const RegressionDataset& ds = prob.ds;
    const Vector& beta_star = prob.beta_star;

    PerfRecord rec;
    rec.replication_index = replication_index;
    rec.seed = rep_cfg.seed;

    const TargetSpec target = build_target(ds, Objective::transductive);
    const DesignCache acache(target.A);
    const double nd = static_cast<double>(ds.n());
    const double md = static_cast<double>(ds.m());
    const double z_scale = md / nd;  // ||Z d||^2 = (m/n) ||A d||^2 for A = sqrt(n/m) Z

    // All errors (numerators and denominators alike) go through this one
    // routine so the lambda2 = 0 tie-break cells reproduce the LASSO cells
    // bit for bit, which pins PERF inside [0, 1] exactly.
    Vector diff(ds.p()), adiff(ds.m());
    auto errors_of = [&](const Vector& beta) {
        for (std::size_t j = 0; j < ds.p(); ++j) diff[j] = beta[j] - beta_star[j];
        std::fill(adiff.begin(), adiff.end(), 0.0);
        for (std::size_t j = 0; j < ds.p(); ++j) {
            const double dj = diff[j];
            if (dj == 0.0) continue;
            const double* col = acache.col(j);
            for (std::size_t r = 0; r < ds.m(); ++r) adiff[r] += dj * col[r];
        }
        ObjectiveErrors e;
        double head = 0.0, total = 0.0;
        for (std::size_t r = 0; r < ds.m(); ++r) {
            total += adiff[r] * adiff[r];
            if (r + 1 == ds.n()) head = total;
        }
        e.z = z_scale * total;
        e.x = z_scale * head;
        e.i = norm2_sq(diff);
        return e;
    };

    // LASSO path over the data-driven grid
    const LambdaGrid lgrid = build_lambda_grid(ds.X, ds.Y, grid.k, grid.eps);
    const std::vector<FitResult> path = lasso_path(ds.X, ds.Y, lgrid.values, solver_cfg);

    std::vector<bool> valid(path.size(), true);
    Oracle den_z, den_x, den_i;
    std::size_t den_z_idx = 0, den_x_idx = 0, den_i_idx = 0;
    for (std::size_t k = 0; k < path.size(); ++k) {
        if (path[k].status == FitStatus::max_iter) {
            valid[k] = false;
            ++rec.failed_cells;
            std::cerr << "warning: replication " << replication_index << ": LASSO fit at lambda="
                      << lgrid.values[k] << " hit the iteration cap; cell excluded\n";
            continue;
        }
        const ObjectiveErrors e = errors_of(path[k].beta);
        if (e.z < den_z.err) den_z_idx = k;
        if (e.x < den_x.err) den_x_idx = k;
        if (e.i < den_i.err) den_i_idx = k;
        den_z.offer(e.z, lgrid.values[k], 0.0);
        den_x.offer(e.x, lgrid.values[k], 0.0);
        den_i.offer(e.i, lgrid.values[k], 0.0);
    }

    // lambda1 values: every grid point, or the coarse subsample plus 0. The
    // coarse set always keeps the denominators' argmin indices so the
    // lambda2 = 0 tie-break cells nest the LASSO oracle and PERF stays <= 1.
    std::vector<std::size_t> lam1_idx;
    if (grid.coarse_lambda1 && lgrid.values.size() > 1) {
        const std::size_t logged = lgrid.values.size() - 1;
        const std::size_t step = std::max<std::size_t>(1, logged / std::max<std::size_t>(1, grid.k1));
        for (std::size_t k = 0; k < logged; k += step) lam1_idx.push_back(k);
        lam1_idx.push_back(lgrid.values.size() - 1);
        lam1_idx.push_back(den_z_idx);
        lam1_idx.push_back(den_x_idx);
        lam1_idx.push_back(den_i_idx);
        std::sort(lam1_idx.begin(), lam1_idx.end());
        lam1_idx.erase(std::unique(lam1_idx.begin(), lam1_idx.end()), lam1_idx.end());
    } else {
        for (std::size_t k = 0; k < lgrid.values.size(); ++k) lam1_idx.push_back(k);
    }

    const double prelim_scale = std::sqrt(nd / md);
    Oracle num_z, num_x, num_i;
    Vector prelim_value(ds.m());
    for (std::size_t k : lam1_idx) {
        if (!valid[k]) continue;
        const double lam1 = lgrid.values[k];
        const Vector& coef = path[k].beta;

        // label-preserving preliminary: sqrt(n/m) * [Y ; (Z coef)_{n+1..m}]
        for (std::size_t r = 0; r < ds.n(); ++r) prelim_value[r] = prelim_scale * ds.Y[r];
        for (std::size_t r = ds.n(); r < ds.m(); ++r) {
            double acc = 0.0;
            for (std::size_t j = 0; j < ds.p(); ++j)
                if (coef[j] != 0.0) acc += ds.Z(r, j) * coef[j];
            prelim_value[r] = prelim_scale * acc;
        }

        const LambdaGrid l2grid = build_lambda_grid(target.A, prelim_value, grid.k, grid.eps);
        Vector warm_beta;
        bool have_warm = false;
        for (double lam2 : l2grid.values) {
            ObjectiveErrors e;
            if (lam2 == 0.0) {
                // tie-break: the preliminary LASSO coefficients are the
                // designated lambda2 = 0 minimizer
                e = errors_of(coef);
            } else {
                FitResult fit = lasso_fit_cached(acache, prelim_value, lam2, solver_cfg,
                                                 have_warm ? &warm_beta : nullptr);
                if (fit.status == FitStatus::max_iter) {
                    ++rec.failed_cells;
                    std::cerr << "warning: replication " << replication_index
                              << ": transductive fit at (lambda1=" << lam1 << ", lambda2=" << lam2
                              << ") hit the iteration cap; cell excluded\n";
                    continue;
                }
                e = errors_of(fit.beta);
                warm_beta = std::move(fit.beta);
                have_warm = true;
            }
            num_z.offer(e.z, lam1, lam2);
            num_x.offer(e.x, lam1, lam2);
            num_i.offer(e.i, lam1, lam2);
        }
    }

    const auto ratio = [](const Oracle& num, const Oracle& den) {
        if (den.err <= 1e-12) return 1.0;  // no measurable LASSO error to improve on
        return num.err / den.err;
    };
    rec.perf_z = ratio(num_z, den_z);
    rec.perf_x = ratio(num_x, den_x);
    rec.perf_i = ratio(num_i, den_i);
    rec.lasso_lambda_z = den_z.lam1;
    rec.lasso_lambda_x = den_x.lam1;
    rec.lasso_lambda_i = den_i.lam1;
    rec.tl_lambda1_z = num_z.lam1;
    rec.tl_lambda2_z = num_z.lam2;
    rec.tl_lambda1_x = num_x.lam1;
    rec.tl_lambda2_x = num_x.lam2;
    rec.tl_lambda1_i = num_i.lam1;
    rec.tl_lambda2_i = num_i.lam2;
    return rec;
}

std::vector<PerfRecord> run_experiment(const SynthConfig& cfg, std::size_t count,
                                       const GridParams& grid, const SolverConfig& solver_cfg,
                                       std::size_t threads) {
    if (count == 0) throw std::invalid_argument("run_experiment: need at least one replication");
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<std::size_t>(threads, count);

    std::vector<PerfRecord> records(count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) records[i] = run_replication(cfg, grid, solver_cfg, i);
        return records;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&]() {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    records[i] = run_replication(cfg, grid, solver_cfg, i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mu);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
    return records;
}

PerfSummary aggregate(const std::vector<PerfRecord>& records) {
    if (records.empty()) throw std::invalid_argument("aggregate: no records");
    PerfSummary summary;
    summary.replications = records.size();

    auto stats = [&](auto getter) {
        Vector vals;
        vals.reserve(records.size());
        for (const PerfRecord& r : records) vals.push_back(getter(r));
        std::sort(vals.begin(), vals.end());
        PerfStats s;
        double sum = 0.0;
        for (double v : vals) sum += v;  // sorted sum: order-independent
        s.mean = sum / static_cast<double>(vals.size());
        s.median = quantile_linear(vals, 0.5);
        s.q03 = quantile_linear(vals, 0.3);
        return s;
    };
    summary.z = stats([](const PerfRecord& r) { return r.perf_z; });
    summary.x = stats([](const PerfRecord& r) { return r.perf_x; });
    summary.i = stats([](const PerfRecord& r) { return r.perf_i; });
    return summary;
}

ErrorCurve emit_error_curve(const RegressionDataset& ds, const Vector& beta_star,
                            const LambdaGrid& grid, const SolverConfig& solver_cfg) {
    if (beta_star.size() != ds.p())
        throw std::invalid_argument("emit_error_curve: beta_star length must be p");
    const std::vector<FitResult> path = lasso_path(ds.X, ds.Y, grid.values, solver_cfg);

    ErrorCurve curve;
    double best_den = std::numeric_limits<double>::infinity();
    double best_tr = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < path.size(); ++k) {
        const Vector diff = sub(path[k].beta, beta_star);
        ErrorCurveRow row;
        row.lambda = grid.values[k];
        row.denoise_err = norm2_sq(matvec(ds.X, diff)) / static_cast<double>(ds.n());
        row.transduct_err = norm2_sq(matvec(ds.Z, diff)) / static_cast<double>(ds.m());
        row.support_correct = true;
        for (std::size_t j = 0; j < ds.p(); ++j) {
            if ((path[k].beta[j] != 0.0) != (beta_star[j] != 0.0)) {
                row.support_correct = false;
                break;
            }
        }
        if (row.denoise_err < best_den) {
            best_den = row.denoise_err;
            curve.argmin_denoise_lambda = row.lambda;
        }
        if (row.transduct_err < best_tr) {
            best_tr = row.transduct_err;
            curve.argmin_transduct_lambda = row.lambda;
        }
        curve.rows.push_back(row);
    }
    return curve;
}

}  // namespace translasso
