#include "translasso/synth.hpp"

#include <cmath>
#include <stdexcept>

namespace translasso {

void validate(const SynthConfig& cfg) {
    if (cfg.p == 0) throw std::invalid_argument("synth: p must be positive");
    if (cfg.s > cfg.p) throw std::invalid_argument("synth: s must be <= p");
    if (cfg.n == 0) throw std::invalid_argument("synth: n must be positive");
    if (cfg.m < cfg.n) throw std::invalid_argument("synth: m must be >= n");
    if (!(cfg.rho >= 0.0 && cfg.rho < 1.0)) throw std::invalid_argument("synth: rho must be in [0, 1)");
    if (!(cfg.sigma2 >= 0.0) || !std::isfinite(cfg.sigma2))
        throw std::invalid_argument("synth: sigma2 must be finite and >= 0");
    if (!std::isfinite(cfg.beta_value)) throw std::invalid_argument("synth: beta_value must be finite");
}

SynthProblem generate(const SynthConfig& cfg, bool normalize) {
    validate(cfg);
    Rng rng(cfg.seed);

    Matrix z(cfg.m, cfg.p);
    for (std::size_t i = 0; i < cfg.m; ++i) {
        const Vector row = mvn_ar1_row(cfg.p, cfg.rho, rng);
        for (std::size_t j = 0; j < cfg.p; ++j) z(i, j) = row[j];
    }

    Matrix x(cfg.n, cfg.p);
    for (std::size_t i = 0; i < cfg.n; ++i)
        for (std::size_t j = 0; j < cfg.p; ++j) x(i, j) = z(i, j);

    if (normalize) {
        const double n = static_cast<double>(cfg.n);
        for (std::size_t j = 0; j < cfg.p; ++j) {
            double sq = 0.0;
            for (std::size_t i = 0; i < cfg.n; ++i) sq += x(i, j) * x(i, j);
            if (sq <= 0.0) throw std::runtime_error("synth: zero column, cannot normalize");
            const double c = std::sqrt(n / sq);
            for (std::size_t i = 0; i < cfg.n; ++i) x(i, j) *= c;
            for (std::size_t i = 0; i < cfg.m; ++i) z(i, j) *= c;
        }
    }

    Vector beta_star(cfg.p, 0.0);
    for (std::size_t j = 0; j < cfg.s; ++j) beta_star[j] = cfg.beta_value;

    const double sigma = std::sqrt(cfg.sigma2);
    Vector y = matvec(x, beta_star);
    for (std::size_t i = 0; i < cfg.n; ++i) y[i] += sigma * rng.next_gaussian();

    SynthProblem out;
    out.beta_star = std::move(beta_star);
    out.ds = make_dataset(std::move(x), std::move(y), std::move(z), sigma);
    return out;
}

NormalizeResult normalize_columns(const RegressionDataset& ds) {
    NormalizeResult out;
    out.ds = ds;
    out.scale.assign(ds.p(), 1.0);
    const double n = static_cast<double>(ds.n());
    for (std::size_t j = 0; j < ds.p(); ++j) {
        double sq = 0.0;
        for (std::size_t i = 0; i < ds.n(); ++i) sq += ds.X(i, j) * ds.X(i, j);
        if (sq <= 0.0)
            throw std::invalid_argument("normalize_columns: column " + std::to_string(j + 1) +
                                        " of X is zero");
        const double c = std::sqrt(n / sq);
        out.scale[j] = c;
        for (std::size_t i = 0; i < ds.n(); ++i) out.ds.X(i, j) *= c;
        for (std::size_t i = 0; i < ds.m(); ++i) out.ds.Z(i, j) *= c;
    }
    return out;
}

}  // namespace translasso
