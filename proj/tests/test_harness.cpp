#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "translasso/harness.hpp"
#include "util.hpp"

using namespace translasso;
using testutil::random_matrix;
using testutil::random_vector;

TEST_CASE("build_lambda_grid: shape, endpoints, degenerate response") {
    Rng rng(501);
    const Matrix x = random_matrix(6, 3, rng);
    const Vector y = random_vector(6, rng);
    const LambdaGrid grid = build_lambda_grid(x, y, 10, 1e-2);
    REQUIRE(grid.values.size() == 11);
    CHECK(grid.values.front() == doctest::Approx(norm_inf(matvec_t(x, y))));
    CHECK(grid.values[9] == doctest::Approx(grid.values.front() * 1e-2));
    CHECK(grid.values.back() == 0.0);
    for (std::size_t k = 1; k < grid.values.size(); ++k)
        CHECK(grid.values[k] < grid.values[k - 1]);

    const LambdaGrid zero = build_lambda_grid(x, Vector(6, 0.0), 10, 1e-2);
    REQUIRE(zero.values.size() == 1);
    CHECK(zero.values[0] == 0.0);

    CHECK_THROWS_AS(build_lambda_grid(x, y, 1, 1e-2), std::invalid_argument);
    CHECK_THROWS_AS(build_lambda_grid(x, y, 10, 1.5), std::invalid_argument);
}

TEST_CASE("build_lambda_grid: single orthonormal column with X'Y = 3") {
    Matrix x(4, 1);
    x(0, 0) = 1.0;  // unit column
    Vector y(4, 0.0);
    y[0] = 3.0;
    const LambdaGrid grid = build_lambda_grid(x, y, 5, 0.1);
    CHECK(grid.values.front() == doctest::Approx(3.0));
}

TEST_CASE("build_lambda_grid: lambda_max is a sharp zero threshold") {
    Rng rng(503);
    const Matrix x = random_matrix(10, 4, rng);
    const Vector y = random_vector(10, rng);
    const LambdaGrid grid = build_lambda_grid(x, y);
    CHECK(norm_inf(lasso_fit({x, y, grid.values.front()}).beta) == 0.0);
    CHECK(norm_inf(lasso_fit({x, y, grid.values.front() * (1.0 - 1e-6)}).beta) > 0.0);
}

TEST_CASE("run_replication: collapsed grid and zero denominators give PERF = 1") {
    SynthConfig cfg;
    cfg.p = 4;
    cfg.s = 0;
    cfg.n = 6;
    cfg.m = 9;
    cfg.sigma2 = 0.0;  // Y = 0: the grid is {0} and all errors vanish
    cfg.seed = 17;
    const PerfRecord rec = run_replication(cfg, GridParams{});
    CHECK(rec.perf_z == 1.0);
    CHECK(rec.perf_x == 1.0);
    CHECK(rec.perf_i == 1.0);
}

TEST_CASE("run_replication: noiseless identifiable instance hits the ratio policy") {
    SynthConfig cfg;
    cfg.p = 3;
    cfg.s = 2;
    cfg.n = 10;
    cfg.m = 14;
    cfg.sigma2 = 0.0;
    cfg.seed = 19;
    GridParams grid;
    grid.k = 20;
    const PerfRecord rec = run_replication(cfg, grid);
    CHECK(rec.perf_z == 1.0);  // denominator <= 1e-12 at lambda = 0
}

TEST_CASE("run_replication: PERF stays in [0, 1] across random configurations") {
    GridParams grid;
    grid.k = 15;
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        SynthConfig cfg;
        cfg.p = 6;
        cfg.s = 2;
        cfg.n = 8;
        cfg.m = 16;
        cfg.rho = seed % 2 ? 0.8 : 0.2;
        cfg.sigma2 = 1.0;
        cfg.seed = 1000 + seed;
        const PerfRecord rec = run_replication(cfg, grid, SolverConfig{}, seed);
        for (double v : {rec.perf_z, rec.perf_x, rec.perf_i}) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
        CHECK(rec.failed_cells == 0);
    }
}

TEST_CASE("run_replication: coarse lambda1 mode stays close to the full grid") {
    SynthConfig cfg;
    cfg.p = 5;
    cfg.s = 1;
    cfg.n = 8;
    cfg.m = 12;
    cfg.seed = 23;
    GridParams full;
    full.k = 30;
    GridParams coarse = full;
    coarse.coarse_lambda1 = true;
    coarse.k1 = 5;
    const PerfRecord a = run_replication(cfg, full);
    const PerfRecord b = run_replication(cfg, coarse);
    CHECK(b.perf_z >= a.perf_z - 1e-12);  // coarse searches a subset
    CHECK(b.perf_z <= 1.0);
}

TEST_CASE("run_experiment: deterministic and append-only in the replication count") {
    SynthConfig cfg;
    cfg.p = 4;
    cfg.s = 1;
    cfg.n = 6;
    cfg.m = 10;
    cfg.seed = 29;
    GridParams grid;
    grid.k = 10;
    const std::vector<PerfRecord> five = run_experiment(cfg, 5, grid, SolverConfig{}, 1);
    const std::vector<PerfRecord> ten = run_experiment(cfg, 10, grid, SolverConfig{}, 2);
    REQUIRE(ten.size() == 10);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(five[i].perf_z == ten[i].perf_z);
        CHECK(five[i].perf_x == ten[i].perf_x);
        CHECK(five[i].perf_i == ten[i].perf_i);
        CHECK(five[i].seed == ten[i].seed);
        CHECK(five[i].tl_lambda2_z == ten[i].tl_lambda2_z);
    }
}

TEST_CASE("aggregate: singleton, interpolation, permutation invariance") {
    PerfRecord a;
    a.perf_z = a.perf_x = a.perf_i = 0.4;
    const PerfSummary single = aggregate({a});
    CHECK(single.z.mean == 0.4);
    CHECK(single.z.median == 0.4);
    CHECK(single.z.q03 == 0.4);

    PerfRecord zero, one;
    zero.perf_z = zero.perf_x = zero.perf_i = 0.0;
    one.perf_z = one.perf_x = one.perf_i = 1.0;
    const PerfSummary pair = aggregate({zero, one});
    CHECK(pair.z.mean == doctest::Approx(0.5));
    CHECK(pair.z.median == doctest::Approx(0.5));
    CHECK(pair.z.q03 == doctest::Approx(0.3));

    std::vector<PerfRecord> records;
    Rng rng(31);
    for (int i = 0; i < 9; ++i) {
        PerfRecord r;
        r.perf_z = r.perf_x = r.perf_i = rng.next_uniform();
        records.push_back(r);
    }
    const PerfSummary fwd = aggregate(records);
    std::reverse(records.begin(), records.end());
    const PerfSummary rev = aggregate(records);
    CHECK(fwd.z.mean == rev.z.mean);
    CHECK(fwd.z.median == rev.z.median);
    CHECK(fwd.z.q03 == rev.z.q03);
    CHECK(fwd.z.q03 <= fwd.z.median);

    CHECK_THROWS_AS(aggregate({}), std::invalid_argument);
}

TEST_CASE("emit_error_curve: null fit at lambda_max, vanishing errors when noiseless") {
    SynthConfig cfg;
    cfg.p = 4;
    cfg.s = 2;
    cfg.n = 12;
    cfg.m = 18;
    cfg.sigma2 = 0.0;
    cfg.seed = 37;
    const SynthProblem prob = generate(cfg);
    const LambdaGrid grid = build_lambda_grid(prob.ds.X, prob.ds.Y, 25);
    const ErrorCurve curve = emit_error_curve(prob.ds, prob.beta_star, grid);
    REQUIRE(curve.rows.size() == grid.values.size());

    // first row: beta = 0, so the errors are those of the null fit
    const double null_denoise = norm2_sq(matvec(prob.ds.X, prob.beta_star)) / double(cfg.n);
    CHECK(curve.rows.front().denoise_err == doctest::Approx(null_denoise).epsilon(1e-9));
    CHECK(curve.rows.front().support_correct == false);  // s > 0 but fit is empty

    // noiseless + identifiable: lambda -> 0 drives both errors to 0
    CHECK(curve.rows.back().denoise_err < 1e-10);
    CHECK(curve.rows.back().transduct_err < 1e-10);

    CHECK(curve.argmin_denoise_lambda == curve.rows.back().lambda);
    CHECK(curve.argmin_transduct_lambda == curve.rows.back().lambda);
}

TEST_CASE("emit_error_curve: support flag tracks exact sign-free recovery") {
    SynthConfig cfg;
    cfg.p = 5;
    cfg.s = 5;
    cfg.n = 20;
    cfg.m = 20;
    cfg.sigma2 = 0.0;
    cfg.seed = 41;
    const SynthProblem prob = generate(cfg);
    const LambdaGrid grid = build_lambda_grid(prob.ds.X, prob.ds.Y, 15);
    const ErrorCurve curve = emit_error_curve(prob.ds, prob.beta_star, grid);
    CHECK(curve.rows.back().support_correct == true);  // lambda = 0 recovers everything
    CHECK(curve.rows.front().support_correct == false);
}
