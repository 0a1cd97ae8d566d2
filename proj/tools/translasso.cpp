// Command-line surface for the transductive sparse-regression toolkit:
//   synth       generate a synthetic problem and write it as CSV
//   fit         fit lasso / dantzig / tlasso / tdantzig on CSV data
//   experiment  replicated PERF study with CSV/JSON outputs
//   bounds      assumption constants and sparsity-inequality bounds
//   check       Monte-Carlo validation of a bound (exit 1 on failure)
// Exit codes: 0 ok, 1 check failure, 2 usage/config error, 3 data error.

#include <cstdio>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "translasso/io.hpp"

using nlohmann::json;
using namespace translasso;

namespace {

constexpr std::uint64_t kMcSeedOffset = 1000003;  // keeps MC noise streams off the data streams

int cmd_synth(const std::string& config_path, SynthConfig flags_cfg, bool have_flags,
              bool normalize, const std::string& out_dir) {
    SynthConfig cfg = flags_cfg;
    if (!config_path.empty()) {
        const ExperimentConfig file_cfg = load_experiment_config(config_path);
        cfg = file_cfg.synth;
        if (have_flags)
            std::cerr << "note: --config given, ignoring direct synth flags except --seed\n";
    }
    validate(cfg);
    const SynthProblem prob = generate(cfg, normalize);
    save_dataset(out_dir, prob.ds, &prob.beta_star);
    std::cout << "wrote X.csv, Y.csv, Z.csv, beta_star.csv, meta.json under " << out_dir << "\n";
    return 0;
}

double estimate_sigma_naive_ols(const RegressionDataset& ds) {
    const Matrix g = gram(ds.X);
    const std::size_t rank = psd_rank(g);
    if (ds.n() <= rank)
        throw std::runtime_error("--estimate-sigma naive-ols needs n > rank(X)");
    const Vector w = matvec(pseudo_inverse(g), matvec_t(ds.X, ds.Y));
    const double rss = norm2_sq(sub(ds.Y, matvec(ds.X, w)));
    return std::sqrt(rss / static_cast<double>(ds.n() - rank));
}

json fit_result_json(const FitResult& fit) {
    json j;
    j["lambda"] = fit.lambda;
    j["iterations"] = fit.iterations;
    j["kkt_residual"] = fit.kkt_residual;
    j["objective"] = fit.objective;
    std::size_t nnz = 0;
    for (double b : fit.beta)
        if (b != 0.0) ++nnz;
    j["nonzeros"] = nnz;
    switch (fit.status) {
        case FitStatus::converged: j["status"] = "converged"; break;
        case FitStatus::max_iter: j["status"] = "max_iter"; break;
        case FitStatus::infeasible: j["status"] = "infeasible"; break;
    }
    return j;
}

int cmd_fit(const std::string& x_path, const std::string& y_path,
            const std::optional<std::string>& z_path, bool stack, double sigma, bool have_sigma,
            const std::string& estimate_sigma, const std::string& method, double lambda,
            double lambda1, const std::string& objective, const std::string& prelim, double gamma,
            const std::string& out_path) {
    RegressionDataset ds = load_dataset(x_path, y_path, z_path, have_sigma ? sigma : 1.0, stack);
    if (!have_sigma) {
        if (estimate_sigma.empty())
            throw std::runtime_error(
                "--sigma is required (the model assumes known noise level); "
                "--estimate-sigma naive-ols provides an out-of-model fallback");
        if (estimate_sigma != "naive-ols")
            throw std::runtime_error("unknown --estimate-sigma method '" + estimate_sigma + "'");
        ds.sigma = estimate_sigma_naive_ols(ds);
        std::cerr << "note: sigma estimated by naive OLS (out-of-model): " << ds.sigma << "\n";
    }

    FitResult fit;
    if (method == "lasso") {
        fit = lasso_fit({ds.X, ds.Y, lambda});
    } else if (method == "dantzig") {
        fit = dantzig_fit({ds.X, ds.Y, lambda});
    } else if (method == "tlasso" || method == "tdantzig") {
        Objective obj = Objective::transductive;
        if (objective == "denoising")
            obj = Objective::denoising;
        else if (objective == "estimation")
            obj = Objective::estimation;
        else if (objective != "transductive")
            throw std::runtime_error("unknown --objective '" + objective + "'");
        const TargetSpec spec = build_target(ds, obj);

        PreliminaryEstimate pre;
        if (prelim == "lasso")
            pre = preliminary_lasso(ds, spec, lambda1);
        else if (prelim == "pseudo_ls")
            pre = preliminary_pseudo_ls(ds, spec);
        else if (prelim == "ridge")
            pre = preliminary_ridge(ds, spec, gamma);
        else if (prelim == "identity")
            pre = preliminary_identity(ds, spec);
        else
            throw std::runtime_error("unknown --prelim '" + prelim + "'");
        if (obj == Objective::transductive) pre = label_preserving_adjust(ds, spec, pre);

        fit = method == "tlasso" ? transductive_lasso(ds, spec, pre, lambda)
                                 : transductive_dantzig(ds, spec, pre, lambda);
    } else {
        throw std::runtime_error("unknown --method '" + method + "'");
    }

    if (!out_path.empty()) save_vector_csv(out_path, fit.beta);
    std::cout << fit_result_json(fit).dump(2) << "\n";
    return fit.status == FitStatus::infeasible ? 3 : 0;
}

int cmd_experiment(const std::string& config_path, std::optional<std::size_t> replications,
                   std::optional<std::uint64_t> seed, std::size_t threads,
                   const std::string& records_path, const std::string& summary_path,
                   const std::string& curve_path) {
    ExperimentConfig cfg = load_experiment_config(config_path);
    if (replications) cfg.replications = *replications;
    if (seed) cfg.synth.seed = *seed;
    if (!records_path.empty()) cfg.output.records_csv = records_path;
    if (!summary_path.empty()) cfg.output.summary_json = summary_path;
    if (!curve_path.empty()) cfg.output.curve_csv = curve_path;

    const std::vector<PerfRecord> records =
        run_experiment(cfg.synth, cfg.replications, cfg.grid, SolverConfig{}, threads);
    const PerfSummary summary = aggregate(records);

    if (!cfg.output.records_csv.empty()) save_records_csv(cfg.output.records_csv, records);
    if (!cfg.output.summary_json.empty()) save_summary_json(cfg.output.summary_json, cfg, summary);
    if (!cfg.output.curve_csv.empty()) {
        SynthConfig curve_cfg = cfg.synth;  // replication 0's data
        const SynthProblem prob = generate(curve_cfg);
        const LambdaGrid grid = build_lambda_grid(prob.ds.X, prob.ds.Y, cfg.grid.k, cfg.grid.eps);
        save_curve_csv(cfg.output.curve_csv, emit_error_curve(prob.ds, prob.beta_star, grid));
    }
    std::cout << summary_table_row(cfg, summary) << "\n";
    return 0;
}

json assumption_json(const AssumptionReport& rep) {
    json j;
    j["c1"] = rep.c1;
    j["c3"] = rep.c3;
    j["cone_exact"] = rep.cone_exact;
    j["kappa_thm3"] = rep.kappa_thm3;
    j["kappa_thm3_proof_variant"] = rep.kappa_thm3_proof;
    j["kappa_mc"] = rep.kappa_mc;
    j["k_thm4"] = rep.k_const;
    j["eta"] = rep.eta;
    j["notes"] = rep.notes;
    return j;
}

json bound_json(const BoundReport& b) {
    return json{{"pred_bound", b.pred_bound}, {"l1_bound", b.l1_bound}, {"lambda", b.lambda_used}};
}

struct BoundsContext {
    RegressionDataset ds;
    Vector beta_star;
    TargetSpec spec;
    PrelimBuilder builder;
    AssumptionReport report;
    std::size_t s = 0;
};

BoundsContext make_bounds_context(const BoundsConfig& cfg) {
    BoundsContext ctx;
    SynthProblem prob = generate(cfg.synth, cfg.normalize);
    ctx.ds = std::move(prob.ds);
    ctx.beta_star = std::move(prob.beta_star);
    ctx.spec = build_target(ctx.ds, cfg.objective);
    ctx.builder = make_prelim_builder(cfg.prelim, cfg.prelim_param);
    ctx.report = assess_assumptions(ctx.ds, ctx.spec, ctx.beta_star, ctx.builder, cfg.eta,
                                    cfg.mc_reps, cfg.cone, cfg.synth.seed + kMcSeedOffset);
    for (double b : ctx.beta_star)
        if (b != 0.0) ++ctx.s;
    return ctx;
}

int cmd_bounds(const std::string& config_path) {
    const BoundsConfig cfg = load_bounds_config(config_path);
    const BoundsContext ctx = make_bounds_context(cfg);

    // the Monte-Carlo kappa is the operative constant for the bound values
    const double kappa = ctx.report.kappa_mc;
    json out;
    out["assumptions"] = assumption_json(ctx.report);
    out["s"] = ctx.s;
    if (ctx.report.c1 > 0.0) {
        out["bounds"]["thm1"] = bound_json(bound_thm1(ctx.report.c1, kappa, ctx.ds.sigma, ctx.s,
                                                      ctx.ds.p(), cfg.eta, ctx.ds.n()));
        if (cfg.objective == Objective::transductive)
            out["bounds"]["corollary1"]["pred_bound"] = bound_corollary1(
                ctx.report.c1, kappa, ctx.ds.sigma, ctx.s, ctx.ds.p(), cfg.eta, ctx.ds.n());
    }
    if (ctx.report.c3 > 0.0)
        out["bounds"]["thm2"] = bound_json(bound_thm2(ctx.report.c3, kappa, ctx.ds.sigma, ctx.s,
                                                      ctx.ds.p(), cfg.eta, ctx.ds.n()));
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_check(const std::string& config_path, std::optional<std::size_t> reps_override) {
    const BoundsConfig cfg = load_bounds_config(config_path);
    const BoundsContext ctx = make_bounds_context(cfg);
    const std::size_t reps = reps_override.value_or(cfg.check_reps);

    const double kappa = ctx.report.kappa_mc;
    const double c = cfg.theorem == BoundTheorem::lasso_thm2 ? ctx.report.c3 : ctx.report.c1;
    if (!(c > 0.0)) throw std::runtime_error("check: cone constant is zero; assumption H fails");

    BoundReport bound;
    switch (cfg.theorem) {
        case BoundTheorem::dantzig_thm1:
            bound = bound_thm1(c, kappa, ctx.ds.sigma, ctx.s, ctx.ds.p(), cfg.eta, ctx.ds.n());
            break;
        case BoundTheorem::lasso_thm2:
            bound = bound_thm2(c, kappa, ctx.ds.sigma, ctx.s, ctx.ds.p(), cfg.eta, ctx.ds.n());
            break;
        case BoundTheorem::corollary1:
            bound = bound_thm1(c, kappa, ctx.ds.sigma, ctx.s, ctx.ds.p(), cfg.eta, ctx.ds.n());
            bound.theorem = BoundTheorem::corollary1;
            bound.pred_bound =
                bound_corollary1(c, kappa, ctx.ds.sigma, ctx.s, ctx.ds.p(), cfg.eta, ctx.ds.n());
            break;
    }

    const double rate = validate_bound(ctx.ds, ctx.spec, cfg.theorem, ctx.builder, ctx.beta_star,
                                       bound, reps, cfg.synth.seed + 2 * kMcSeedOffset);
    const double slack = 3.0 * std::sqrt(cfg.eta * (1.0 - cfg.eta) / static_cast<double>(reps));
    const bool pass = rate <= cfg.eta + slack;

    json out;
    out["violation_rate"] = rate;
    out["eta"] = cfg.eta;
    out["slack"] = slack;
    out["reps"] = reps;
    out["bound"] = bound_json(bound);
    out["pass"] = pass;
    std::cout << out.dump(2) << "\n";
    return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Transductive LASSO / Dantzig Selector toolkit"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "generate synthetic data as CSV");
    std::string synth_config, synth_out = "synth_out";
    SynthConfig synth_flags;
    bool synth_normalize = false;
    synth->add_option("--config", synth_config, "experiment config JSON (synth section is used)");
    synth->add_option("--p", synth_flags.p, "number of covariates");
    synth->add_option("--s", synth_flags.s, "sparsity (leading nonzeros)");
    synth->add_option("--n", synth_flags.n, "labeled sample size");
    synth->add_option("--m", synth_flags.m, "total rows of Z (labeled + unlabeled)");
    synth->add_option("--rho", synth_flags.rho, "AR(1) correlation in [0,1)");
    synth->add_option("--sigma2", synth_flags.sigma2, "noise variance");
    synth->add_option("--beta-value", synth_flags.beta_value, "value of nonzero coefficients");
    synth->add_option("--seed", synth_flags.seed, "RNG seed");
    synth->add_flag("--normalize", synth_normalize, "normalize columns to X_j'X_j/n = 1");
    synth->add_option("--out-dir", synth_out, "output directory");

    // fit
    auto* fitcmd = app.add_subcommand("fit", "fit one estimator on CSV data");
    std::string fit_x, fit_y, fit_z, fit_method = "lasso", fit_objective = "transductive";
    std::string fit_prelim = "lasso", fit_out, fit_estimate_sigma;
    double fit_sigma = 0.0, fit_lambda = 0.0, fit_lambda1 = 0.0, fit_gamma = 1e-3;
    bool fit_stack = false;
    fitcmd->add_option("--x", fit_x, "design CSV (n x p)")->required();
    fitcmd->add_option("--y", fit_y, "response CSV (n)")->required();
    fitcmd->add_option("--z", fit_z, "stacked design CSV (m x p, X as first rows)");
    fitcmd->add_flag("--stack", fit_stack, "treat --z as unlabeled rows to stack below X");
    auto* sigma_opt = fitcmd->add_option("--sigma", fit_sigma, "known noise s.d.");
    fitcmd->add_option("--estimate-sigma", fit_estimate_sigma,
                       "out-of-model sigma estimate (naive-ols)");
    fitcmd->add_option("--method", fit_method, "lasso | dantzig | tlasso | tdantzig");
    fitcmd->add_option("--lambda", fit_lambda, "regularization parameter (lambda2 for t*)");
    fitcmd->add_option("--lambda1", fit_lambda1, "preliminary LASSO parameter");
    fitcmd->add_option("--objective", fit_objective, "transductive | denoising | estimation");
    fitcmd->add_option("--prelim", fit_prelim, "lasso | pseudo_ls | ridge | identity");
    fitcmd->add_option("--gamma", fit_gamma, "ridge preliminary gamma");
    fitcmd->add_option("--out", fit_out, "write fitted beta as CSV");

    // experiment
    auto* exp = app.add_subcommand("experiment", "replicated PERF experiment");
    std::string exp_config, exp_records, exp_summary, exp_curve;
    std::size_t exp_threads = 0;
    std::optional<std::size_t> exp_reps;
    std::optional<std::uint64_t> exp_seed;
    exp->add_option("--config", exp_config, "experiment config JSON")->required();
    exp->add_option("--replications", exp_reps, "override replication count");
    exp->add_option("--seed", exp_seed, "override base seed");
    exp->add_option("--threads", exp_threads, "worker threads (0 = all cores)");
    exp->add_option("--records", exp_records, "per-replication CSV path");
    exp->add_option("--summary", exp_summary, "summary JSON path");
    exp->add_option("--curve", exp_curve, "error-vs-lambda CSV for replication 0");

    // bounds
    auto* bounds = app.add_subcommand("bounds", "assumption constants and bounds");
    std::string bounds_config;
    bounds->add_option("--config", bounds_config, "bounds config JSON")->required();

    // check
    auto* check = app.add_subcommand("check", "Monte-Carlo bound validation");
    std::string check_config;
    std::optional<std::size_t> check_reps;
    check->add_option("--config", check_config, "bounds config JSON")->required();
    check->add_option("--reps", check_reps, "override validation replications");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        if (synth->parsed()) {
            const bool have_flags = synth->count("--p") || synth->count("--s") ||
                                    synth->count("--n") || synth->count("--m");
            return cmd_synth(synth_config, synth_flags, have_flags, synth_normalize, synth_out);
        }
        if (fitcmd->parsed()) {
            std::optional<std::string> z;
            if (!fit_z.empty()) z = fit_z;
            return cmd_fit(fit_x, fit_y, z, fit_stack, fit_sigma, sigma_opt->count() > 0,
                           fit_estimate_sigma, fit_method, fit_lambda, fit_lambda1, fit_objective,
                           fit_prelim, fit_gamma, fit_out);
        }
        if (exp->parsed())
            return cmd_experiment(exp_config, exp_reps, exp_seed, exp_threads, exp_records,
                                  exp_summary, exp_curve);
        if (bounds->parsed()) return cmd_bounds(bounds_config);
        if (check->parsed()) return cmd_check(check_config, check_reps);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
