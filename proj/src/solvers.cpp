#include "translasso/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace translasso {

double soft_threshold(double z, double t) {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

DesignCache::DesignCache(const Matrix& design)
    : nrows_(design.rows), ncols_(design.cols), cols_(design.rows * design.cols), col_sq_(design.cols) {
    for (std::size_t j = 0; j < ncols_; ++j) {
        double* c = cols_.data() + j * nrows_;
        double sq = 0.0;
        for (std::size_t i = 0; i < nrows_; ++i) {
            const double v = design(i, j);
            c[i] = v;
            sq += v * v;
        }
        col_sq_[j] = sq;
    }
}

namespace {

double dot_n(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy_n(double* y, double a, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double lasso_kkt_residual(const DesignCache& d, const Vector& beta, const Vector& r, double lambda) {
    double worst = 0.0;
    for (std::size_t j = 0; j < d.ncols(); ++j) {
        const double g = dot_n(d.col(j), r.data(), d.nrows());
        double res;
        if (beta[j] != 0.0)
            res = std::fabs(g - lambda * (beta[j] > 0.0 ? 1.0 : -1.0));
        else
            res = std::max(0.0, std::fabs(g) - lambda);
        worst = std::max(worst, res);
    }
    return worst;
}

double lasso_objective(const Vector& beta, const Vector& r, double lambda) {
    return norm2_sq(r) + 2.0 * lambda * norm1(beta);
}

}  // namespace

FitResult lasso_fit_cached(const DesignCache& d, const Vector& response, double lambda,
                           const SolverConfig& cfg, const Vector* warm_start) {
    const std::size_t n = d.nrows();
    const std::size_t p = d.ncols();
    if (response.size() != n) throw std::invalid_argument("lasso_fit: design/response shape mismatch");
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("lasso_fit: lambda must be finite and >= 0");
    if (!all_finite(response)) throw std::invalid_argument("lasso_fit: non-finite response");

    Vector beta(p, 0.0);
    Vector r = response;
    if (warm_start) {
        if (warm_start->size() != p) throw std::invalid_argument("lasso_fit: warm start length mismatch");
        beta = *warm_start;
        for (std::size_t j = 0; j < p; ++j)
            if (beta[j] != 0.0) axpy_n(r.data(), -beta[j], d.col(j), n);
    }

    std::vector<std::size_t> active;
    active.reserve(64);

    FitResult out;
    out.lambda = lambda;

    auto update_coord = [&](std::size_t j) -> double {
        const double aj = d.col_sq(j);
        if (aj <= 0.0) return 0.0;
        const double* xj = d.col(j);
        const double rho = dot_n(xj, r.data(), n) + aj * beta[j];
        const double bnew = soft_threshold(rho, lambda) / aj;
        const double diff = bnew - beta[j];
        if (diff != 0.0) {
            axpy_n(r.data(), -diff, xj, n);
            beta[j] = bnew;
        }
        return std::fabs(diff);
    };

    // Once the support has (nearly) settled, cyclic descent can crawl on
    // correlated designs. Solving the reduced KKT system on the current
    // support in closed form finishes the fit in one step; the candidate is
    // accepted only if its signs match and the full subgradient check passes.
    auto try_polish = [&]() -> bool {
        std::vector<std::size_t> supp;
        for (std::size_t j = 0; j < p; ++j)
            if (beta[j] != 0.0) supp.push_back(j);
        if (supp.empty() || supp.size() > 400) return false;

        // Sign-flip pruning: coordinates whose restricted solution crosses
        // zero drop out of the support and the system is re-solved. The
        // candidate is only ever accepted through the full KKT check below.
        Vector bs;
        for (int round = 0; round < 6; ++round) {
            const std::size_t k = supp.size();
            if (k == 0) return false;
            Matrix gss(k, k);
            Vector rhs(k);
            for (std::size_t a = 0; a < k; ++a) {
                const double* ca = d.col(supp[a]);
                for (std::size_t b = a; b < k; ++b) {
                    const double v = dot_n(ca, d.col(supp[b]), n);
                    gss(a, b) = v;
                    gss(b, a) = v;
                }
                rhs[a] = dot_n(ca, response.data(), n) -
                         lambda * (beta[supp[a]] > 0.0 ? 1.0 : -1.0);
            }
            try {
                bs = solve_spd(gss, rhs);
            } catch (const std::runtime_error&) {
                // dependent support columns: retry with a tiny ridge
                double tr = 0.0;
                for (std::size_t a = 0; a < k; ++a) tr += gss(a, a);
                const double ridge = 1e-10 * std::max(tr / static_cast<double>(k), 1e-300);
                for (std::size_t a = 0; a < k; ++a) gss(a, a) += ridge;
                try {
                    bs = solve_spd(gss, rhs);
                } catch (const std::runtime_error&) {
                    return false;
                }
            }
            std::vector<std::size_t> kept;
            kept.reserve(k);
            Vector kept_vals;
            kept_vals.reserve(k);
            for (std::size_t a = 0; a < k; ++a) {
                if (bs[a] != 0.0 && (bs[a] > 0.0) == (beta[supp[a]] > 0.0)) {
                    kept.push_back(supp[a]);
                    kept_vals.push_back(bs[a]);
                }
            }
            if (kept.size() == k) {
                bs = std::move(kept_vals);
                break;
            }
            supp = std::move(kept);
            if (round == 5) return false;
        }
        if (supp.empty() || bs.size() != supp.size()) return false;

        Vector cand(p, 0.0);
        Vector cand_r = response;
        for (std::size_t a = 0; a < supp.size(); ++a) {
            cand[supp[a]] = bs[a];
            axpy_n(cand_r.data(), -bs[a], d.col(supp[a]), n);
        }
        if (lasso_objective(cand, cand_r, lambda) > lasso_objective(beta, r, lambda))
            return false;  // keep the objective monotone
        const double cand_kkt = lasso_kkt_residual(d, cand, cand_r, lambda);
        if (cand_kkt > cfg.kkt_tol) return false;
        beta = std::move(cand);
        r = std::move(cand_r);
        return true;
    };

    std::size_t sweeps = 0;
    bool converged = false;
    double kkt = std::numeric_limits<double>::infinity();
    while (sweeps < cfg.max_iter) {
        // full sweep; rebuild the active set as we go
        active.clear();
        double maxd = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
            maxd = std::max(maxd, update_coord(j));
            if (beta[j] != 0.0) active.push_back(j);
        }
        ++sweeps;
        if (cfg.track_objective) out.objective_trace.push_back(lasso_objective(beta, r, lambda));

        const double beta_scale = 1.0 + norm_inf(beta);
        if (maxd < 1e-4 * beta_scale && try_polish()) {
            kkt = lasso_kkt_residual(d, beta, r, lambda);
            converged = true;
            if (cfg.track_objective) out.objective_trace.push_back(lasso_objective(beta, r, lambda));
            break;
        }
        if (maxd < cfg.cd_tol) {
            kkt = lasso_kkt_residual(d, beta, r, lambda);
            if (kkt <= cfg.kkt_tol) {
                converged = true;
                break;
            }
            continue;  // near-stationary but not optimal yet: keep full sweeps
        }

        while (sweeps < cfg.max_iter) {
            double md = 0.0;
            for (std::size_t j : active) md = std::max(md, update_coord(j));
            ++sweeps;
            if (cfg.track_objective) out.objective_trace.push_back(lasso_objective(beta, r, lambda));
            if (md < cfg.cd_tol) break;
        }
    }

    if (!converged) kkt = lasso_kkt_residual(d, beta, r, lambda);
    out.beta = std::move(beta);
    out.iterations = sweeps;
    out.kkt_residual = kkt;
    out.objective = lasso_objective(out.beta, r, lambda);
    out.status = converged ? FitStatus::converged : FitStatus::max_iter;
    return out;
}

FitResult lasso_fit(const LassoProblem& prob, const SolverConfig& cfg, const Vector* warm_start) {
    if (!all_finite(prob.design)) throw std::invalid_argument("lasso_fit: non-finite design");
    DesignCache d(prob.design);
    return lasso_fit_cached(d, prob.response, prob.lambda, cfg, warm_start);
}

std::vector<FitResult> lasso_path(const Matrix& design, const Vector& response,
                                  const std::vector<double>& lambdas, const SolverConfig& cfg) {
    if (!all_finite(design)) throw std::invalid_argument("lasso_path: non-finite design");
    DesignCache d(design);
    std::vector<FitResult> out;
    out.reserve(lambdas.size());
    const Vector* warm = nullptr;
    for (double lam : lambdas) {
        out.push_back(lasso_fit_cached(d, response, lam, cfg, warm));
        warm = &out.back().beta;
    }
    return out;
}

// ---------------------------------------------------------------------------
// simplex
// ---------------------------------------------------------------------------

namespace {

constexpr double kPivotEps = 1e-11;

struct Tableau {
    std::size_t m, width;            // rows, columns incl. rhs
    std::vector<double> t;           // (m+1) x width, last row = reduced costs
    std::vector<std::size_t> basis;  // basic variable per row

    double& at(std::size_t i, std::size_t j) { return t[i * width + j]; }
    double at(std::size_t i, std::size_t j) const { return t[i * width + j]; }

    void pivot(std::size_t prow, std::size_t pcol) {
        const double pv = at(prow, pcol);
        double* pr = &t[prow * width];
        for (std::size_t j = 0; j < width; ++j) pr[j] /= pv;
        for (std::size_t i = 0; i <= m; ++i) {
            if (i == prow) continue;
            const double f = at(i, pcol);
            if (f == 0.0) continue;
            double* row = &t[i * width];
            for (std::size_t j = 0; j < width; ++j) row[j] -= f * pr[j];
            row[pcol] = 0.0;
        }
        basis[prow] = pcol;
    }
};

// Runs Bland-rule simplex iterations on a canonical tableau. `allowed`
// marks columns eligible to enter the basis.
LpStatus run_simplex(Tableau& tb, const std::vector<bool>& allowed, const SolverConfig& cfg,
                     std::size_t& pivots) {
    const std::size_t obj = tb.m;
    while (true) {
        if (pivots >= cfg.max_iter) return LpStatus::max_iter;

        std::size_t enter = tb.width;  // rhs column = sentinel
        for (std::size_t j = 0; j + 1 < tb.width; ++j) {
            if (!allowed[j]) continue;
            if (tb.at(obj, j) < -cfg.opt_tol) {
                enter = j;
                break;  // Bland: lowest index
            }
        }
        if (enter == tb.width) return LpStatus::optimal;

        // rows where a basic artificial sits at zero must leave first,
        // otherwise the artificial could re-enter the solution
        std::size_t leave = tb.m;
        for (std::size_t i = 0; i < tb.m; ++i) {
            if (!allowed[tb.basis[i]] && std::fabs(tb.at(i, enter)) > kPivotEps &&
                std::fabs(tb.at(i, tb.width - 1)) <= cfg.feas_tol) {
                leave = i;
                break;
            }
        }
        if (leave == tb.m) {
            double best_ratio = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < tb.m; ++i) {
                const double a = tb.at(i, enter);
                if (a <= kPivotEps) continue;
                const double ratio = tb.at(i, tb.width - 1) / a;
                if (ratio < best_ratio - 1e-12 ||
                    (ratio < best_ratio + 1e-12 && (leave == tb.m || tb.basis[i] < tb.basis[leave]))) {
                    best_ratio = ratio;
                    leave = i;
                }
            }
            if (leave == tb.m) return LpStatus::unbounded;
        }

        tb.pivot(leave, enter);
        ++pivots;
    }
}

}  // namespace

LpResult lp_simplex(const Vector& c, const Matrix& a_ub, const Vector& b_ub, const SolverConfig& cfg) {
    const std::size_t m = a_ub.rows;
    const std::size_t n = a_ub.cols;
    if (c.size() != n || b_ub.size() != m) throw std::invalid_argument("lp_simplex: shape mismatch");
    if (!all_finite(c) || !all_finite(a_ub) || !all_finite(b_ub))
        throw std::invalid_argument("lp_simplex: non-finite input");

    // columns: n structural | m slack | artificials | rhs
    std::size_t n_art = 0;
    for (std::size_t i = 0; i < m; ++i)
        if (b_ub[i] < 0.0) ++n_art;

    Tableau tb;
    tb.m = m;
    tb.width = n + m + n_art + 1;
    tb.t.assign((m + 1) * tb.width, 0.0);
    tb.basis.assign(m, 0);

    std::size_t art = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double sgn = b_ub[i] < 0.0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < n; ++j) tb.at(i, j) = sgn * a_ub(i, j);
        tb.at(i, n + i) = sgn;
        tb.at(i, tb.width - 1) = sgn * b_ub[i];
        if (b_ub[i] < 0.0) {
            tb.at(i, n + m + art) = 1.0;
            tb.basis[i] = n + m + art;
            ++art;
        } else {
            tb.basis[i] = n + i;
        }
    }

    LpResult res;
    std::vector<bool> allowed(tb.width - 1, true);

    if (n_art > 0) {
        // phase 1: minimize the artificial sum
        for (std::size_t j = 0; j < tb.width; ++j) tb.at(m, j) = 0.0;
        for (std::size_t j = n + m; j < n + m + n_art; ++j) tb.at(m, j) = 1.0;
        for (std::size_t i = 0; i < m; ++i) {
            if (tb.basis[i] >= n + m) {
                for (std::size_t j = 0; j < tb.width; ++j) tb.at(m, j) -= tb.at(i, j);
            }
        }
        const LpStatus st = run_simplex(tb, allowed, cfg, res.pivots);
        if (st == LpStatus::max_iter) {
            res.status = st;
            return res;
        }
        const double phase1 = -tb.at(m, tb.width - 1);
        if (phase1 > cfg.feas_tol) {
            res.status = LpStatus::infeasible;
            return res;
        }
        // pivot remaining basic artificials out where possible
        for (std::size_t i = 0; i < m; ++i) {
            if (tb.basis[i] < n + m) continue;
            for (std::size_t j = 0; j < n + m; ++j) {
                if (std::fabs(tb.at(i, j)) > kPivotEps) {
                    tb.pivot(i, j);
                    ++res.pivots;
                    break;
                }
            }
        }
        for (std::size_t j = n + m; j < n + m + n_art; ++j) allowed[j] = false;
    }

    // phase 2
    for (std::size_t j = 0; j < tb.width; ++j) tb.at(m, j) = 0.0;
    for (std::size_t j = 0; j < n; ++j) tb.at(m, j) = c[j];
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t bi = tb.basis[i];
        if (bi < n && c[bi] != 0.0) {
            const double f = c[bi];
            for (std::size_t j = 0; j < tb.width; ++j) tb.at(m, j) -= f * tb.at(i, j);
        }
    }
    res.status = run_simplex(tb, allowed, cfg, res.pivots);
    if (res.status == LpStatus::unbounded || res.status == LpStatus::max_iter) return res;
    res.status = LpStatus::optimal;

    res.x.assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        if (tb.basis[i] < n) res.x[tb.basis[i]] = tb.at(i, tb.width - 1);
    res.objective = dot(c, res.x);
    return res;
}

FitResult dantzig_fit(const DantzigProblem& prob, const SolverConfig& cfg) {
    if (!all_finite(prob.design) || !all_finite(prob.response))
        throw std::invalid_argument("dantzig_fit: non-finite input");
    if (!(prob.lambda >= 0.0) || !std::isfinite(prob.lambda))
        throw std::invalid_argument("dantzig_fit: lambda must be finite and >= 0");
    if (prob.design.rows != prob.response.size())
        throw std::invalid_argument("dantzig_fit: design/response shape mismatch");

    const std::size_t p = prob.design.cols;
    const Matrix g = gram(prob.design);
    const Vector v = matvec_t(prob.design, prob.response);

    Vector c(2 * p, 1.0);
    Matrix a(2 * p, 2 * p);
    Vector b(2 * p);
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            a(i, j) = g(i, j);
            a(i, p + j) = -g(i, j);
            a(p + i, j) = -g(i, j);
            a(p + i, p + j) = g(i, j);
        }
        b[i] = prob.lambda + v[i];
        b[p + i] = prob.lambda - v[i];
    }

    const LpResult lp = lp_simplex(c, a, b, cfg);

    FitResult out;
    out.lambda = prob.lambda;
    out.iterations = lp.pivots;
    switch (lp.status) {
        case LpStatus::optimal:
            out.status = FitStatus::converged;
            break;
        case LpStatus::max_iter:
            out.status = FitStatus::max_iter;
            break;
        default:
            out.status = FitStatus::infeasible;
            break;
    }
    if (out.status == FitStatus::infeasible) {
        out.beta.assign(p, 0.0);
        return out;
    }

    out.beta.resize(p);
    for (std::size_t j = 0; j < p; ++j) out.beta[j] = lp.x[j] - lp.x[p + j];
    out.objective = norm1(out.beta);
    const Vector resid = sub(prob.response, matvec(prob.design, out.beta));
    out.kkt_residual = std::max(0.0, norm_inf(matvec_t(prob.design, resid)) - prob.lambda);
    return out;
}

}  // namespace translasso
