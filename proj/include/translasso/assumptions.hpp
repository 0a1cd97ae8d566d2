#pragma once

#include <functional>
#include <string>

#include "translasso/estimators.hpp"

namespace translasso {

// Restricted cone {alpha : sum_{j not in S} |alpha_j| <= tau * sum_{j in S} |alpha_j|}
// over the support S of the true coefficient vector.
struct ConeSpec {
    std::vector<std::size_t> support;  // 0-based indices of S
    double tau = 1.0;
};

struct ConeBudget {
    std::size_t directions = 10000;  // random cone directions
    std::size_t grad_steps = 100;    // projected-gradient refinements each
    std::size_t exhaustive_max_p = 8;
    std::uint64_t seed = 20240901;
};

// Estimates c(A, tau) = inf over the cone of alpha'(A'A)alpha / (n sum_S alpha_j^2).
// For p <= exhaustive_max_p the infimum is computed exactly by enumerating the
// cone's faces (zero patterns, sign orthants and the l1-tight hyperplane) and
// extracting generalized-eigenvalue critical points on each. Beyond that the
// randomized search returns an upper estimate, never a certificate.
double cone_constant(const Matrix& a, std::size_t n, const ConeSpec& cone,
                     const ConeBudget& budget = {});

// Builds a preliminary estimate from a (possibly resampled) dataset.
using PrelimBuilder =
    std::function<PreliminaryEstimate(const RegressionDataset&, const TargetSpec&)>;

PrelimBuilder make_prelim_builder(PrelimMethod method, double param = 0.0,
                                  const SolverConfig& cfg = {});

// Empirical (1-eta)-quantile, over fresh-noise replications, of
//   ||A'(Ab*_hat - A b*)||_inf / (sigma sqrt(2 n log(p/eta))),
// i.e. the smallest kappa making Assumption conf hold empirically.
// Per-replication noise streams are seeded as seed + rep.
double conf_kappa_mc(const RegressionDataset& ds, const TargetSpec& spec, const Vector& beta_star,
                     const PrelimBuilder& builder, double eta, std::size_t reps,
                     std::uint64_t seed);

// Closed-form kappa for the pseudo-least-squares preliminary:
//   kappa = sqrt(p / sum_j 1/W_jj),  W = (A'A)(X'X)^+(A'A) / n.
// Requires Ker(A) = Ker(X) (checked numerically through ranks). The proof
// variant evaluates kappa = sqrt(p / (n sum_j 1/O_jj)) with O = n W; the two
// forms agree in exact arithmetic and both are exposed.
double kappa_theorem3(const RegressionDataset& ds, const TargetSpec& spec,
                      bool use_proof_variant = false, double tol = 1e-10);

// Smallest k with ||[(X'X)-(A'A)]u||_inf <= k sigma sqrt(2 n log p) over
// ||u||_1 <= 2||b*||_1, via the closed form
//   k = 2||b*||_1 max_ij |Delta_ij| / (sigma sqrt(2 n log p)).
// p = 1 makes log p = 0 and is rejected.
double k_theorem4(const RegressionDataset& ds, const TargetSpec& spec, const Vector& beta_star);

enum class BoundTheorem { dantzig_thm1, lasso_thm2, corollary1 };

struct BoundReport {
    double pred_bound = 0.0;  // on ||A(b_hat - b*)||_2^2 (corollary1: on (1/m)||Z(...)||^2)
    double l1_bound = 0.0;
    double lambda_used = 0.0;
    BoundTheorem theorem = BoundTheorem::dantzig_thm1;
};

// pred = 8 k^2 s^2 s log(p/eta) / c1 ... with lambda = kappa sigma sqrt(2n log(p/eta))
BoundReport bound_thm1(double c1, double kappa, double sigma, std::size_t s, std::size_t p,
                       double eta, std::size_t n);
// Literal constants of the LASSO theorem: pred carries 72 kappa^2 sigma^2 and
// the l1 bound 24 sqrt(2) s / c3 (the paper's l1 display has no kappa sigma
// factor); lambda = 2 kappa sigma sqrt(2n log(p/eta)).
BoundReport bound_thm2(double c3, double kappa, double sigma, std::size_t s, std::size_t p,
                       double eta, std::size_t n);
// (1/m)||Z(b_hat - b*)||_2^2 <= 8 kappa^2 sigma^2 s log(p/eta) / (c1 n)
double bound_corollary1(double c1, double kappa, double sigma, std::size_t s, std::size_t p,
                        double eta, std::size_t n);

// Fraction of fresh-noise replications whose realized error exceeds the
// bound. The indicator compares the realized ||A(b_hat - b*)||^2 against
// pred_bound directly, i.e. the theorems' joint event (bound and conf
// together). Expected to stay below eta + 3 sqrt(eta(1-eta)/reps).
double validate_bound(const RegressionDataset& ds, const TargetSpec& spec, BoundTheorem estimator,
                      const PrelimBuilder& builder, const Vector& beta_star,
                      const BoundReport& bound, std::size_t reps, std::uint64_t seed,
                      const SolverConfig& cfg = {});

struct AssumptionReport {
    double c1 = 0.0;
    double c3 = 0.0;
    bool cone_exact = false;
    double kappa_thm3 = 0.0;        // NaN when the kernel hypothesis fails
    double kappa_thm3_proof = 0.0;  // proof-variant formula
    double kappa_mc = 0.0;
    double k_const = 0.0;
    double eta = 0.1;
    std::string notes;
};

// One-stop evaluation used by the bounds/check commands.
AssumptionReport assess_assumptions(const RegressionDataset& ds, const TargetSpec& spec,
                                    const Vector& beta_star, const PrelimBuilder& builder,
                                    double eta, std::size_t mc_reps, const ConeBudget& budget,
                                    std::uint64_t seed);

}  // namespace translasso
