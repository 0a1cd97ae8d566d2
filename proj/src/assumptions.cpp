#include "translasso/assumptions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace translasso {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double cone_ratio(const Matrix& b, const std::vector<bool>& in_s, const Vector& alpha) {
    double denom = 0.0;
    for (std::size_t j = 0; j < alpha.size(); ++j)
        if (in_s[j]) denom += alpha[j] * alpha[j];
    if (denom <= 1e-18 * std::max(1e-300, norm2_sq(alpha))) return kInf;
    return dot(alpha, matvec(b, alpha)) / denom;
}

bool cone_feasible(const std::vector<bool>& in_s, double tau, const Vector& alpha) {
    double s_mass = 0.0, sc_mass = 0.0;
    for (std::size_t j = 0; j < alpha.size(); ++j)
        (in_s[j] ? s_mass : sc_mass) += std::fabs(alpha[j]);
    return sc_mass <= tau * s_mass + 1e-9 * (sc_mass + tau * s_mass + 1e-300);
}

Matrix submatrix(const Matrix& b, const std::vector<std::size_t>& idx) {
    Matrix out(idx.size(), idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = 0; j < idx.size(); ++j) out(i, j) = b(idx[i], idx[j]);
    return out;
}

// Orthonormal basis of the hyperplane {z : phi'z = 0} via a Householder
// reflection sending phi to a coordinate axis.
Matrix hyperplane_basis(const Vector& phi) {
    const std::size_t d = phi.size();
    Vector u = phi;
    const double nrm = std::sqrt(norm2_sq(u));
    for (double& v : u) v /= nrm;
    Vector v = u;
    v[0] += (u[0] >= 0.0 ? 1.0 : -1.0);
    const double vsq = norm2_sq(v);
    Matrix basis(d, d - 1);
    for (std::size_t col = 1; col < d; ++col) {
        for (std::size_t row = 0; row < d; ++row) {
            const double h = (row == col ? 1.0 : 0.0) - 2.0 * v[row] * v[col] / vsq;
            basis(row, col - 1) = h;
        }
    }
    return basis;
}

// All critical directions of the pencil (Q, D) on a subspace, i.e. solutions
// of Q z = mu D z restricted to where z'Dz > 0, via the Schur complement of
// the D-null block. Returned vectors live in subspace coordinates.
std::vector<Vector> pencil_candidates(const Matrix& q, const Matrix& dmat) {
    const std::size_t d = q.rows;
    Vector dvals;
    Matrix dvecs;
    jacobi_eigen(dmat, dvals, dvecs);
    const double dmax = dvals.empty() ? 0.0 : std::max(0.0, dvals[0]);
    const double cut = 1e-12 * std::max(dmax, 1e-300);

    std::vector<std::size_t> pos, nul;
    for (std::size_t k = 0; k < d; ++k) (dvals[k] > cut ? pos : nul).push_back(k);
    if (pos.empty()) return {};
    const std::size_t r = pos.size();

    // blocks of Q in the eigenbasis of D
    Matrix u1(d, r), u0(d, nul.size());
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t k = 0; k < r; ++k) u1(i, k) = dvecs(i, pos[k]);
        for (std::size_t k = 0; k < nul.size(); ++k) u0(i, k) = dvecs(i, nul[k]);
    }
    const Matrix qu1 = matmul(q, u1);
    Matrix q11 = matmul(transpose(u1), qu1);
    Matrix schur = q11;
    Matrix q00p, q01;
    if (!nul.empty()) {
        const Matrix qu0 = matmul(q, u0);
        q01 = matmul(transpose(u1), qu0);
        const Matrix q00 = matmul(transpose(u0), qu0);
        q00p = pseudo_inverse(q00, 1e-12);
        const Matrix corr = matmul(q01, matmul(q00p, transpose(q01)));
        for (std::size_t i = 0; i < schur.data.size(); ++i) schur.data[i] -= corr.data[i];
    }

    Vector lam_isqrt(r);
    for (std::size_t k = 0; k < r; ++k) lam_isqrt[k] = 1.0 / std::sqrt(dvals[pos[k]]);
    Matrix m(r, r);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j)
            m(i, j) = 0.5 * (schur(i, j) + schur(j, i)) * lam_isqrt[i] * lam_isqrt[j];

    Vector mvals;
    Matrix mvecs;
    jacobi_eigen(m, mvals, mvecs);

    std::vector<Vector> out;
    out.reserve(r);
    for (std::size_t k = 0; k < r; ++k) {
        Vector y1(r);
        for (std::size_t i = 0; i < r; ++i) y1[i] = lam_isqrt[i] * mvecs(i, k);
        Vector z = matvec(u1, y1);
        if (!nul.empty()) {
            const Vector y0 = matvec(q00p, matvec_t(q01, y1));
            for (std::size_t i = 0; i < d; ++i) {
                double acc = 0.0;
                for (std::size_t kk = 0; kk < nul.size(); ++kk) acc += u0(i, kk) * y0[kk];
                z[i] -= acc;
            }
        }
        out.push_back(std::move(z));
    }
    return out;
}

double cone_exact(const Matrix& b, std::size_t n, const std::vector<bool>& in_s, double tau) {
    const std::size_t p = b.rows;
    double best = kInf;
    Vector alpha(p);

    auto consider = [&](const std::vector<std::size_t>& nz, const Vector& z) {
        std::fill(alpha.begin(), alpha.end(), 0.0);
        for (std::size_t k = 0; k < nz.size(); ++k) alpha[nz[k]] = z[k];
        if (!cone_feasible(in_s, tau, alpha)) return;
        best = std::min(best, cone_ratio(b, in_s, alpha));
    };

    // coordinate directions on the support are always feasible
    for (std::size_t j = 0; j < p; ++j)
        if (in_s[j]) best = std::min(best, b(j, j));

    // faces with the l1 constraint slack: only the zero pattern matters
    for (std::size_t mask = 1; mask < (std::size_t{1} << p); ++mask) {
        std::vector<std::size_t> nz;
        bool has_s = false;
        for (std::size_t j = 0; j < p; ++j) {
            if (mask & (std::size_t{1} << j)) {
                nz.push_back(j);
                has_s = has_s || in_s[j];
            }
        }
        if (!has_s) continue;
        const Matrix bf = submatrix(b, nz);
        Matrix df(nz.size(), nz.size());
        for (std::size_t k = 0; k < nz.size(); ++k) df(k, k) = in_s[nz[k]] ? 1.0 : 0.0;
        for (const Vector& z : pencil_candidates(bf, df)) consider(nz, z);
    }

    // faces with the l1 constraint tight: sign patterns fix the hyperplane
    std::size_t total = 1;
    for (std::size_t j = 0; j < p; ++j) total *= 3;
    std::vector<int> tern(p, 0);
    for (std::size_t code = 1; code < total; ++code) {
        std::size_t c = code;
        for (std::size_t j = 0; j < p; ++j) {
            tern[j] = static_cast<int>(c % 3);  // 0, 1 (+), 2 (-)
            c /= 3;
        }
        std::vector<std::size_t> nz;
        bool has_s = false;
        for (std::size_t j = 0; j < p; ++j) {
            if (tern[j] != 0) {
                nz.push_back(j);
                has_s = has_s || in_s[j];
            }
        }
        if (!has_s || nz.size() < 2) continue;

        Vector phi(nz.size());
        for (std::size_t k = 0; k < nz.size(); ++k) {
            const double sgn = tern[nz[k]] == 1 ? 1.0 : -1.0;
            phi[k] = in_s[nz[k]] ? -tau * sgn : sgn;
        }
        const Matrix bf = submatrix(b, nz);
        Matrix df(nz.size(), nz.size());
        for (std::size_t k = 0; k < nz.size(); ++k) df(k, k) = in_s[nz[k]] ? 1.0 : 0.0;

        const Matrix basis = hyperplane_basis(phi);
        const Matrix q = matmul(transpose(basis), matmul(bf, basis));
        const Matrix dsub = matmul(transpose(basis), matmul(df, basis));
        for (const Vector& z : pencil_candidates(q, dsub)) consider(nz, matvec(basis, z));
    }

    return best / static_cast<double>(n);
}

double cone_randomized(const Matrix& b, std::size_t n, const std::vector<bool>& in_s, double tau,
                       const ConeBudget& budget) {
    const std::size_t p = b.rows;
    std::vector<std::size_t> s_idx, sc_idx;
    for (std::size_t j = 0; j < p; ++j) (in_s[j] ? s_idx : sc_idx).push_back(j);

    double best = kInf;
    for (std::size_t j : s_idx) best = std::min(best, b(j, j));

    Rng rng(budget.seed);
    auto project = [&](Vector& alpha) -> bool {
        double s_mass = 0.0, sc_mass = 0.0;
        for (std::size_t j : s_idx) s_mass += std::fabs(alpha[j]);
        for (std::size_t j : sc_idx) sc_mass += std::fabs(alpha[j]);
        if (s_mass <= 1e-300) return false;
        if (sc_mass > tau * s_mass) {
            const double shrink = tau * s_mass / sc_mass;
            for (std::size_t j : sc_idx) alpha[j] *= shrink;
        }
        double sq = 0.0;
        for (std::size_t j : s_idx) sq += alpha[j] * alpha[j];
        const double inv = 1.0 / std::sqrt(sq);
        for (double& v : alpha) v *= inv;
        return true;
    };

    Vector alpha(p), trial(p);
    for (std::size_t it = 0; it < budget.directions; ++it) {
        // Dirichlet magnitudes with random signs; S^c mass = tau * u
        std::fill(alpha.begin(), alpha.end(), 0.0);
        double tot = 0.0;
        for (std::size_t j : s_idx) {
            alpha[j] = -std::log(1.0 - rng.next_uniform());
            tot += alpha[j];
        }
        for (std::size_t j : s_idx) {
            alpha[j] /= tot;
            if (rng.next_u64() & 1u) alpha[j] = -alpha[j];
        }
        if (!sc_idx.empty()) {
            const double mass = tau * rng.next_uniform();
            tot = 0.0;
            for (std::size_t j : sc_idx) {
                alpha[j] = -std::log(1.0 - rng.next_uniform());
                tot += alpha[j];
            }
            for (std::size_t j : sc_idx) {
                alpha[j] *= mass / tot;
                if (rng.next_u64() & 1u) alpha[j] = -alpha[j];
            }
        }
        if (!project(alpha)) continue;

        double f = cone_ratio(b, in_s, alpha);
        double step = 0.25;
        for (std::size_t g = 0; g < budget.grad_steps; ++g) {
            const Vector ba = matvec(b, alpha);
            Vector grad(p);
            for (std::size_t j = 0; j < p; ++j)
                grad[j] = 2.0 * (ba[j] - (in_s[j] ? f * alpha[j] : 0.0));
            const double gnorm = std::sqrt(norm2_sq(grad));
            if (gnorm <= 1e-14 * std::max(1.0, std::fabs(f))) break;

            bool moved = false;
            for (int halvings = 0; halvings < 20; ++halvings) {
                trial = alpha;
                for (std::size_t j = 0; j < p; ++j) trial[j] -= step / gnorm * grad[j];
                if (project(trial)) {
                    const double ft = cone_ratio(b, in_s, trial);
                    if (ft < f - 1e-15 * std::max(1.0, std::fabs(f))) {
                        alpha = trial;
                        f = ft;
                        step *= 1.5;
                        moved = true;
                        break;
                    }
                }
                step *= 0.5;
            }
            if (!moved) break;
        }
        best = std::min(best, f);
    }
    return best / static_cast<double>(n);
}

}  // namespace

double cone_constant(const Matrix& a, std::size_t n, const ConeSpec& cone,
                     const ConeBudget& budget) {
    if (cone.support.empty()) throw std::invalid_argument("cone_constant: empty support");
    if (!(cone.tau > 0.0)) throw std::invalid_argument("cone_constant: tau must be positive");
    if (n == 0) throw std::invalid_argument("cone_constant: n must be positive");
    const std::size_t p = a.cols;
    std::vector<bool> in_s(p, false);
    for (std::size_t j : cone.support) {
        if (j >= p) throw std::invalid_argument("cone_constant: support index out of range");
        in_s[j] = true;
    }
    const Matrix b = gram(a);
    if (p <= budget.exhaustive_max_p) return cone_exact(b, n, in_s, cone.tau);
    return cone_randomized(b, n, in_s, cone.tau, budget);
}

PrelimBuilder make_prelim_builder(PrelimMethod method, double param, const SolverConfig& cfg) {
    switch (method) {
        case PrelimMethod::pseudo_ls:
            return [](const RegressionDataset& d, const TargetSpec& s) {
                return preliminary_pseudo_ls(d, s);
            };
        case PrelimMethod::ridge:
            return [param](const RegressionDataset& d, const TargetSpec& s) {
                return preliminary_ridge(d, s, param);
            };
        case PrelimMethod::lasso:
            return [param, cfg](const RegressionDataset& d, const TargetSpec& s) {
                return preliminary_lasso(d, s, param, cfg);
            };
        case PrelimMethod::identity_response:
            return [](const RegressionDataset& d, const TargetSpec& s) {
                return preliminary_identity(d, s);
            };
    }
    throw std::invalid_argument("make_prelim_builder: unknown method");
}

double conf_kappa_mc(const RegressionDataset& ds, const TargetSpec& spec, const Vector& beta_star,
                     const PrelimBuilder& builder, double eta, std::size_t reps,
                     std::uint64_t seed) {
    if (reps < 100) throw std::invalid_argument("conf_kappa_mc: reps must be >= 100");
    if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("conf_kappa_mc: eta must be in (0,1)");
    if (beta_star.size() != ds.p()) throw std::invalid_argument("conf_kappa_mc: beta_star length");

    const Vector target = matvec(spec.A, beta_star);
    const Vector signal = matvec(ds.X, beta_star);

    RegressionDataset work = ds;
    Vector vals(reps);
    for (std::size_t rep = 0; rep < reps; ++rep) {
        Rng rng(seed + rep);
        for (std::size_t i = 0; i < ds.n(); ++i)
            work.Y[i] = signal[i] + ds.sigma * rng.next_gaussian();
        const PreliminaryEstimate prelim = builder(work, spec);
        vals[rep] = norm_inf(matvec_t(spec.A, sub(prelim.value, target)));
    }
    std::sort(vals.begin(), vals.end());
    const double q = quantile_linear(vals, 1.0 - eta);

    const double denom = ds.sigma * std::sqrt(2.0 * static_cast<double>(ds.n()) *
                                              std::log(static_cast<double>(ds.p()) / eta));
    if (denom == 0.0) return q <= 1e-12 ? 0.0 : kInf;
    return q / denom;
}

double kappa_theorem3(const RegressionDataset& ds, const TargetSpec& spec, bool use_proof_variant,
                      double tol) {
    const Matrix gx = gram(ds.X);
    const Matrix ga = gram(spec.A);

    // Ker(A) = Ker(X) iff rank(A'A) = rank(X'X) = rank of the scale-balanced sum
    const std::size_t rx = psd_rank(gx, tol);
    const std::size_t ra = psd_rank(ga, tol);
    double sx = max_abs(gx), sa = max_abs(ga);
    if (sx <= 0.0 || sa <= 0.0)
        throw std::runtime_error("kappa_theorem3: hypothesis Ker(A) = Ker(X) violated (zero matrix)");
    Matrix sum(gx.rows, gx.cols);
    for (std::size_t i = 0; i < sum.data.size(); ++i)
        sum.data[i] = gx.data[i] / sx + ga.data[i] / sa;
    if (rx != ra || psd_rank(sum, tol) != rx)
        throw std::runtime_error("kappa_theorem3: hypothesis Ker(A) = Ker(X) violated");

    const Matrix omega = matmul(ga, matmul(pseudo_inverse(gx, tol), ga));
    const double n = static_cast<double>(ds.n());
    const double p = static_cast<double>(ds.p());
    double inv_sum = 0.0;
    const double diag_scale = max_abs(omega);
    for (std::size_t j = 0; j < omega.rows; ++j) {
        const double d = omega(j, j);
        if (d <= 1e-12 * std::max(diag_scale, 1e-300))
            throw std::runtime_error("kappa_theorem3: zero diagonal in Omega");
        // statement form uses Omega/n; the proof form keeps Omega and divides
        // the ratio by n — identical values, both spelled out
        inv_sum += use_proof_variant ? 1.0 / d : 1.0 / (d / n);
    }
    if (use_proof_variant) return std::sqrt(p / (n * inv_sum));
    return std::sqrt(p / inv_sum);
}

double k_theorem4(const RegressionDataset& ds, const TargetSpec& spec, const Vector& beta_star) {
    if (ds.p() < 2)
        throw std::invalid_argument("k_theorem4: p = 1 makes log(p) = 0, bound degenerate");
    if (beta_star.size() != ds.p()) throw std::invalid_argument("k_theorem4: beta_star length");
    const Matrix gx = gram(ds.X);
    const Matrix ga = gram(spec.A);
    double delta_max = 0.0;
    for (std::size_t i = 0; i < gx.data.size(); ++i)
        delta_max = std::max(delta_max, std::fabs(gx.data[i] - ga.data[i]));
    const double numer = 2.0 * norm1(beta_star) * delta_max;
    if (numer == 0.0) return 0.0;
    if (ds.sigma == 0.0) throw std::invalid_argument("k_theorem4: sigma = 0 with nonzero Gram gap");
    return numer / (ds.sigma * std::sqrt(2.0 * static_cast<double>(ds.n()) *
                                         std::log(static_cast<double>(ds.p()))));
}

namespace {

void check_bound_args(double c, double eta, const char* who) {
    if (!(c > 0.0)) throw std::invalid_argument(std::string(who) + ": assumption fails (c <= 0)");
    if (!(eta > 0.0 && eta < 1.0))
        throw std::invalid_argument(std::string(who) + ": eta must be in (0,1)");
}

}  // namespace

BoundReport bound_thm1(double c1, double kappa, double sigma, std::size_t s, std::size_t p,
                       double eta, std::size_t n) {
    check_bound_args(c1, eta, "bound_thm1");
    const double lg = std::log(static_cast<double>(p) / eta);
    BoundReport r;
    r.theorem = BoundTheorem::dantzig_thm1;
    r.pred_bound = 8.0 * kappa * kappa * sigma * sigma * static_cast<double>(s) * lg / c1;
    r.l1_bound = 2.0 * std::sqrt(2.0) * kappa * sigma * static_cast<double>(s) *
                 std::sqrt(lg / static_cast<double>(n)) / c1;
    r.lambda_used = kappa * sigma * std::sqrt(2.0 * static_cast<double>(n) * lg);
    return r;
}

BoundReport bound_thm2(double c3, double kappa, double sigma, std::size_t s, std::size_t p,
                       double eta, std::size_t n) {
    check_bound_args(c3, eta, "bound_thm2");
    const double lg = std::log(static_cast<double>(p) / eta);
    BoundReport r;
    r.theorem = BoundTheorem::lasso_thm2;
    r.pred_bound = 72.0 * sigma * sigma * kappa * kappa * static_cast<double>(s) * lg / c3;
    r.l1_bound = 24.0 * std::sqrt(2.0) * static_cast<double>(s) *
                 std::sqrt(lg / static_cast<double>(n)) / c3;
    r.lambda_used = 2.0 * kappa * sigma * std::sqrt(2.0 * static_cast<double>(n) * lg);
    return r;
}

double bound_corollary1(double c1, double kappa, double sigma, std::size_t s, std::size_t p,
                        double eta, std::size_t n) {
    check_bound_args(c1, eta, "bound_corollary1");
    const double lg = std::log(static_cast<double>(p) / eta);
    return 8.0 * kappa * kappa * sigma * sigma * static_cast<double>(s) * lg /
           (c1 * static_cast<double>(n));
}

double validate_bound(const RegressionDataset& ds, const TargetSpec& spec, BoundTheorem estimator,
                      const PrelimBuilder& builder, const Vector& beta_star,
                      const BoundReport& bound, std::size_t reps, std::uint64_t seed,
                      const SolverConfig& cfg) {
    if (reps == 0) throw std::invalid_argument("validate_bound: reps must be positive");
    const Vector target = matvec(spec.A, beta_star);
    const Vector signal = matvec(ds.X, beta_star);

    RegressionDataset work = ds;
    std::size_t violations = 0;
    for (std::size_t rep = 0; rep < reps; ++rep) {
        Rng rng(seed + rep);
        for (std::size_t i = 0; i < ds.n(); ++i)
            work.Y[i] = signal[i] + ds.sigma * rng.next_gaussian();
        const PreliminaryEstimate prelim = builder(work, spec);

        FitResult fit;
        if (estimator == BoundTheorem::lasso_thm2)
            fit = lasso_fit({spec.A, prelim.value, bound.lambda_used}, cfg);
        else
            fit = dantzig_fit({spec.A, prelim.value, bound.lambda_used}, cfg);

        double realized = norm2_sq(sub(matvec(spec.A, fit.beta), target));
        if (estimator == BoundTheorem::corollary1) realized /= static_cast<double>(ds.n());
        if (realized > bound.pred_bound * (1.0 + 1e-9) + 1e-12) ++violations;
    }
    return static_cast<double>(violations) / static_cast<double>(reps);
}

AssumptionReport assess_assumptions(const RegressionDataset& ds, const TargetSpec& spec,
                                    const Vector& beta_star, const PrelimBuilder& builder,
                                    double eta, std::size_t mc_reps, const ConeBudget& budget,
                                    std::uint64_t seed) {
    AssumptionReport rep;
    rep.eta = eta;

    ConeSpec cone;
    for (std::size_t j = 0; j < beta_star.size(); ++j)
        if (beta_star[j] != 0.0) cone.support.push_back(j);
    if (cone.support.empty()) {
        rep.notes = "empty support: cone constants undefined; ";
        rep.c1 = rep.c3 = std::numeric_limits<double>::quiet_NaN();
    } else {
        cone.tau = 1.0;
        rep.c1 = cone_constant(spec.A, ds.n(), cone, budget);
        cone.tau = 3.0;
        rep.c3 = cone_constant(spec.A, ds.n(), cone, budget);
        rep.cone_exact = spec.A.cols <= budget.exhaustive_max_p;
        rep.notes = rep.cone_exact ? "cone: exact face enumeration; "
                                   : "cone: randomized upper estimate; ";
    }

    try {
        rep.kappa_thm3 = kappa_theorem3(ds, spec, false);
        rep.kappa_thm3_proof = kappa_theorem3(ds, spec, true);
    } catch (const std::exception& e) {
        rep.kappa_thm3 = rep.kappa_thm3_proof = std::numeric_limits<double>::quiet_NaN();
        rep.notes += std::string(e.what()) + "; ";
    }

    rep.kappa_mc = conf_kappa_mc(ds, spec, beta_star, builder, eta, mc_reps, seed);

    try {
        rep.k_const = k_theorem4(ds, spec, beta_star);
    } catch (const std::exception& e) {
        rep.k_const = std::numeric_limits<double>::quiet_NaN();
        rep.notes += std::string(e.what()) + "; ";
    }
    return rep;
}

}  // namespace translasso
