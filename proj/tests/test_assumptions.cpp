#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "translasso/assumptions.hpp"
#include "translasso/synth.hpp"
#include "util.hpp"

using namespace translasso;
using testutil::max_abs_diff;
using testutil::random_matrix;

TEST_CASE("cone_constant: identity Gram gives exactly 1") {
    const std::size_t p = 4, n = 9;
    Matrix a = Matrix::identity(p);
    for (double& v : a.data) v *= 3.0;  // A'A = 9 I = n I
    ConeSpec cone;
    cone.support = {0, 2};
    cone.tau = 1.0;
    CHECK(cone_constant(a, n, cone) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("cone_constant: kernel direction inside the cone gives 0") {
    Rng rng(401);
    Matrix a = random_matrix(6, 4, rng);
    for (std::size_t i = 0; i < 6; ++i) a(i, 1) = 0.0;
    ConeSpec cone;
    cone.support = {1};
    CHECK(cone_constant(a, 6, cone) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("cone_constant: exact value within 5% of a dense direction grid") {
    Rng rng(409);
    const Matrix a = random_matrix(5, 3, rng);
    const std::size_t n = 5;
    ConeSpec cone;
    cone.support = {0};
    cone.tau = 1.0;
    const double exact = cone_constant(a, n, cone);

    const Matrix b = gram(a);
    double grid_best = std::numeric_limits<double>::infinity();
    const int steps = 1000;
    for (int ia = 0; ia <= steps; ++ia) {
        const double av = -cone.tau + 2.0 * cone.tau * ia / steps;
        const double rem = cone.tau - std::fabs(av);
        for (int ib = 0; ib <= steps; ++ib) {
            const double bv = -rem + 2.0 * rem * ib / steps;
            const Vector alpha = {1.0, av, bv};
            grid_best = std::min(grid_best, dot(alpha, matvec(b, alpha)) / double(n));
        }
    }
    CHECK(exact <= grid_best + 1e-9);
    CHECK(exact == doctest::Approx(grid_best).epsilon(0.05));
}

TEST_CASE("cone_constant: monotone in tau and quadratic in the matrix scale") {
    Rng rng(419);
    const Matrix a = random_matrix(7, 5, rng);
    ConeSpec cone;
    cone.support = {1, 3};
    cone.tau = 1.0;
    const double c1 = cone_constant(a, 7, cone);
    cone.tau = 3.0;
    const double c3 = cone_constant(a, 7, cone);
    CHECK(c1 >= c3 - 1e-12);

    Matrix doubled = a;
    for (double& v : doubled.data) v *= 2.0;
    cone.tau = 1.0;
    CHECK(cone_constant(doubled, 7, cone) == doctest::Approx(4.0 * c1).epsilon(1e-9));
}

TEST_CASE("cone_constant: randomized search upper-bounds the exact infimum") {
    Rng rng(421);
    const Matrix a = random_matrix(8, 6, rng);
    ConeSpec cone;
    cone.support = {0, 4};
    const double exact = cone_constant(a, 8, cone);
    ConeBudget budget;
    budget.exhaustive_max_p = 0;  // force the randomized path
    budget.directions = 3000;
    const double estimate = cone_constant(a, 8, cone, budget);
    CHECK(estimate >= exact - 1e-9);
    CHECK(estimate <= exact * 1.5 + 1e-9);
}

TEST_CASE("cone_constant: empty support is rejected") {
    Matrix a = Matrix::identity(3);
    ConeSpec cone;
    CHECK_THROWS_AS(cone_constant(a, 3, cone), std::invalid_argument);
}

namespace {

SynthProblem normalized_problem(std::size_t p, std::size_t s, std::size_t n, std::uint64_t seed) {
    SynthConfig cfg;
    cfg.p = p;
    cfg.s = s;
    cfg.n = n;
    cfg.m = n;
    cfg.rho = 0.3;
    cfg.sigma2 = 1.0;
    cfg.seed = seed;
    return generate(cfg, true);
}

}  // namespace

TEST_CASE("conf_kappa_mc: identity preliminary stays near the theoretical kappa = 1") {
    const SynthProblem prob = normalized_problem(8, 1, 50, 77);
    const TargetSpec spec = build_target(prob.ds, Objective::denoising);
    const double kappa =
        conf_kappa_mc(prob.ds, spec, prob.beta_star,
                      make_prelim_builder(PrelimMethod::identity_response), 0.1, 10000, 5);
    CHECK(kappa <= 1.1);
    CHECK(kappa > 0.3);
}

TEST_CASE("conf_kappa_mc: exact preliminary gives kappa = 0") {
    const SynthProblem prob = normalized_problem(5, 2, 20, 78);
    const TargetSpec spec = build_target(prob.ds, Objective::denoising);
    const Vector truth = matvec(spec.A, prob.beta_star);
    const PrelimBuilder oracle_builder = [&](const RegressionDataset&, const TargetSpec&) {
        PreliminaryEstimate pre;
        pre.value = truth;
        return pre;
    };
    CHECK(conf_kappa_mc(prob.ds, spec, prob.beta_star, oracle_builder, 0.1, 200, 5) == 0.0);
}

TEST_CASE("conf_kappa_mc: deterministic and permutation-invariant") {
    const SynthProblem prob = normalized_problem(6, 2, 15, 79);
    const TargetSpec spec = build_target(prob.ds, Objective::denoising);
    const PrelimBuilder builder = make_prelim_builder(PrelimMethod::pseudo_ls);
    const double k1 = conf_kappa_mc(prob.ds, spec, prob.beta_star, builder, 0.2, 300, 9);
    const double k2 = conf_kappa_mc(prob.ds, spec, prob.beta_star, builder, 0.2, 300, 9);
    CHECK(k1 == k2);

    // permute columns of X (and Z) together with beta*
    const std::vector<std::size_t> perm = {3, 0, 5, 1, 4, 2};
    Matrix xp(prob.ds.X.rows, 6), zp(prob.ds.Z.rows, 6);
    Vector bp(6);
    for (std::size_t j = 0; j < 6; ++j) {
        bp[j] = prob.beta_star[perm[j]];
        for (std::size_t i = 0; i < xp.rows; ++i) xp(i, j) = prob.ds.X(i, perm[j]);
        for (std::size_t i = 0; i < zp.rows; ++i) zp(i, j) = prob.ds.Z(i, perm[j]);
    }
    const RegressionDataset pds = make_dataset(xp, prob.ds.Y, zp, prob.ds.sigma);
    const TargetSpec pspec = build_target(pds, Objective::denoising);
    const double k3 = conf_kappa_mc(pds, pspec, bp, builder, 0.2, 300, 9);
    CHECK(k3 == doctest::Approx(k1).epsilon(1e-6));

    CHECK_THROWS_AS(conf_kappa_mc(prob.ds, spec, prob.beta_star, builder, 0.2, 50, 9),
                    std::invalid_argument);
}

TEST_CASE("kappa_theorem3: normalized denoising target gives 1") {
    const SynthProblem prob = normalized_problem(6, 1, 25, 80);
    const TargetSpec spec = build_target(prob.ds, Objective::denoising);
    CHECK(kappa_theorem3(prob.ds, spec) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(kappa_theorem3(prob.ds, spec, true) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("kappa_theorem3: computed scaling law under A -> cA is c^2") {
    const SynthProblem prob = normalized_problem(5, 1, 20, 81);
    const TargetSpec spec = build_target(prob.ds, Objective::denoising);
    Matrix doubled = spec.A;
    for (double& v : doubled.data) v *= 2.0;
    const TargetSpec spec2 = build_target(prob.ds, Objective::custom, &doubled);
    const double k1 = kappa_theorem3(prob.ds, spec);
    const double k2 = kappa_theorem3(prob.ds, spec2);
    CHECK(k2 == doctest::Approx(4.0 * k1).epsilon(1e-10));
}

TEST_CASE("kappa_theorem3: scalar case reduces to sqrt(Omega-tilde)") {
    Rng rng(431);
    Matrix x(4, 1);
    for (std::size_t i = 0; i < 4; ++i) x(i, 0) = rng.next_gaussian();
    const RegressionDataset ds = make_dataset(x, testutil::random_vector(4, rng), 1.0);
    const TargetSpec spec = build_target(ds, Objective::denoising);
    const double g = gram(ds.X)(0, 0);
    const double omega_tilde = g / 4.0;  // G * G^-1 * G / n
    CHECK(kappa_theorem3(ds, spec) == doctest::Approx(std::sqrt(omega_tilde)).epsilon(1e-10));
}

TEST_CASE("kappa_theorem3: kernel mismatch raises a named error") {
    Rng rng(433);
    const Matrix x = random_matrix(6, 3, rng);
    const RegressionDataset ds = make_dataset(x, testutil::random_vector(6, rng), 1.0);
    Matrix a = x;
    for (std::size_t i = 0; i < 6; ++i) a(i, 1) = 0.0;  // Ker(A) strictly larger
    const TargetSpec spec = build_target(ds, Objective::custom, &a);
    CHECK_THROWS_WITH_AS(kappa_theorem3(ds, spec),
                         "kappa_theorem3: hypothesis Ker(A) = Ker(X) violated",
                         std::runtime_error);
}

TEST_CASE("k_theorem4: zero gap, zero signal, and the sampling oracle") {
    const SynthProblem prob = normalized_problem(4, 2, 12, 82);
    const TargetSpec denoise = build_target(prob.ds, Objective::denoising);
    CHECK(k_theorem4(prob.ds, denoise, prob.beta_star) == 0.0);

    const TargetSpec est = build_target(prob.ds, Objective::estimation);
    const Vector zero(4, 0.0);
    CHECK(k_theorem4(prob.ds, est, zero) == 0.0);

    const double k = k_theorem4(prob.ds, est, prob.beta_star);
    const Matrix gx = gram(prob.ds.X);
    const Matrix ga = gram(est.A);
    Matrix delta = gx;
    for (std::size_t i = 0; i < delta.data.size(); ++i) delta.data[i] -= ga.data[i];
    const double radius = 2.0 * norm1(prob.beta_star);
    const double denom =
        prob.ds.sigma * std::sqrt(2.0 * prob.ds.n() * std::log(double(prob.ds.p())));

    // sampled l1-sphere points never exceed the closed form
    Rng rng(435);
    double sampled_max = 0.0;
    for (int rep = 0; rep < 2000; ++rep) {
        Vector u(4);
        double tot = 0.0;
        for (double& v : u) {
            v = rng.next_gaussian();
            tot += std::fabs(v);
        }
        for (double& v : u) v *= radius / tot;
        sampled_max = std::max(sampled_max, norm_inf(matvec(delta, u)));
    }
    CHECK(sampled_max / denom <= k + 1e-12);

    // equality is attained at a scaled coordinate direction
    double coord_max = 0.0;
    for (std::size_t j = 0; j < 4; ++j) {
        Vector u(4, 0.0);
        u[j] = radius;
        coord_max = std::max(coord_max, norm_inf(matvec(delta, u)));
    }
    CHECK(coord_max / denom == doctest::Approx(k).epsilon(1e-12));

    // p = 1 degenerates
    Rng prng(437);
    Matrix x1(3, 1);
    for (std::size_t i = 0; i < 3; ++i) x1(i, 0) = prng.next_gaussian();
    const RegressionDataset scalar = make_dataset(x1, testutil::random_vector(3, prng), 1.0);
    const TargetSpec sspec = build_target(scalar, Objective::estimation);
    CHECK_THROWS_AS(k_theorem4(scalar, sspec, {1.0}), std::invalid_argument);
}

TEST_CASE("bound_thm1: unit plug-in, empty support, homogeneity") {
    const double eta = 1.0 / M_E;  // p / eta = e, log term = 1
    const BoundReport r = bound_thm1(1.0, 1.0, 1.0, 1, 1, eta, 2);
    CHECK(r.pred_bound == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(r.lambda_used == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(r.l1_bound == doctest::Approx(2.0).epsilon(1e-12));

    const BoundReport s0 = bound_thm1(1.0, 1.0, 1.0, 0, 1, eta, 2);
    CHECK(s0.pred_bound == 0.0);
    CHECK(s0.l1_bound == 0.0);

    const BoundReport sig2 = bound_thm1(1.0, 1.0, 2.0, 1, 1, eta, 2);
    CHECK(sig2.pred_bound == doctest::Approx(4.0 * r.pred_bound).epsilon(1e-12));

    CHECK_THROWS_AS(bound_thm1(0.0, 1.0, 1.0, 1, 1, eta, 2), std::invalid_argument);
}

TEST_CASE("bound_thm2: unit plug-in and the 9 c1/c3 ratio against thm1") {
    const double eta = 1.0 / M_E;
    const BoundReport r = bound_thm2(1.0, 1.0, 1.0, 1, 1, eta, 2);
    CHECK(r.pred_bound == doctest::Approx(72.0).epsilon(1e-12));
    CHECK(bound_thm2(1.0, 1.0, 1.0, 0, 1, eta, 2).pred_bound == 0.0);

    const double c1 = 0.8, c3 = 0.5;
    const BoundReport t1 = bound_thm1(c1, 1.3, 0.7, 3, 20, 0.1, 15);
    const BoundReport t2 = bound_thm2(c3, 1.3, 0.7, 3, 20, 0.1, 15);
    CHECK(t2.pred_bound / t1.pred_bound == doctest::Approx(9.0 * c1 / c3).epsilon(1e-12));
}

TEST_CASE("bound_corollary1 mirrors thm1 with the extra 1/n") {
    const double eta = 1.0 / M_E;
    CHECK(bound_corollary1(1.0, 1.0, 1.0, 1, 1, eta, 2) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(bound_corollary1(1.0, 1.0, 1.0, 0, 1, eta, 2) == 0.0);
    CHECK(bound_corollary1(2.0, 1.0, 3.0, 2, 1, eta, 4) ==
          doctest::Approx(8.0 * 9.0 * 2.0 / (2.0 * 4.0)).epsilon(1e-12));
}

TEST_CASE("validate_bound: noiseless data never violates") {
    SynthConfig cfg;
    cfg.p = 4;
    cfg.s = 1;
    cfg.n = 12;
    cfg.m = 12;
    cfg.sigma2 = 0.0;
    cfg.seed = 21;
    const SynthProblem prob = generate(cfg, true);
    const TargetSpec spec = build_target(prob.ds, Objective::denoising);
    BoundReport bound;
    bound.pred_bound = 0.0;
    bound.lambda_used = 0.0;
    const double rate =
        validate_bound(prob.ds, spec, BoundTheorem::dantzig_thm1,
                       make_prelim_builder(PrelimMethod::identity_response), prob.beta_star,
                       bound, 50, 3);
    CHECK(rate == 0.0);
}

TEST_CASE("validate_bound: a zero bound with noise is violated almost always") {
    const SynthProblem prob = normalized_problem(4, 1, 12, 83);
    const TargetSpec spec = build_target(prob.ds, Objective::denoising);
    BoundReport bound;
    bound.pred_bound = 0.0;
    bound.lambda_used = 1.0;
    const double rate =
        validate_bound(prob.ds, spec, BoundTheorem::dantzig_thm1,
                       make_prelim_builder(PrelimMethod::identity_response), prob.beta_star,
                       bound, 100, 3);
    CHECK(rate >= 0.95);
}

TEST_CASE("validate_bound: theorem 1 holds empirically on a well-posed instance") {
    const SynthProblem prob = normalized_problem(8, 1, 50, 84);
    const TargetSpec spec = build_target(prob.ds, Objective::denoising);
    const PrelimBuilder builder = make_prelim_builder(PrelimMethod::identity_response);
    const double eta = 0.1;

    ConeSpec cone;
    cone.support = {0};
    cone.tau = 1.0;
    const double c1 = cone_constant(spec.A, prob.ds.n(), cone);
    REQUIRE(c1 > 0.0);
    const double kappa = conf_kappa_mc(prob.ds, spec, prob.beta_star, builder, eta, 1000, 31);
    const BoundReport bound =
        bound_thm1(c1, kappa, prob.ds.sigma, 1, prob.ds.p(), eta, prob.ds.n());
    const double rate = validate_bound(prob.ds, spec, BoundTheorem::dantzig_thm1, builder,
                                       prob.beta_star, bound, 200, 77);
    CHECK(rate <= eta + 3.0 * std::sqrt(eta * (1.0 - eta) / 200.0));
}

TEST_CASE("assess_assumptions: assembles a coherent report") {
    const SynthProblem prob = normalized_problem(6, 2, 30, 85);
    const TargetSpec spec = build_target(prob.ds, Objective::denoising);
    const AssumptionReport rep =
        assess_assumptions(prob.ds, spec, prob.beta_star,
                           make_prelim_builder(PrelimMethod::identity_response), 0.1, 200,
                           ConeBudget{}, 11);
    CHECK(rep.cone_exact);
    CHECK(rep.c1 >= rep.c3 - 1e-12);
    CHECK(rep.kappa_thm3 == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(rep.kappa_thm3_proof == doctest::Approx(rep.kappa_thm3).epsilon(1e-10));
    CHECK(rep.k_const == 0.0);
    CHECK(rep.kappa_mc > 0.0);
}
