#include "translasso/estimators.hpp"

#include <cmath>
#include <stdexcept>

namespace translasso {

RegressionDataset make_dataset(Matrix x, Vector y, Matrix z, double sigma) {
    if (x.rows == 0 || x.cols == 0) throw std::invalid_argument("dataset: X must be non-empty");
    if (y.size() != x.rows) throw std::invalid_argument("dataset: Y length must match rows of X");
    if (z.cols != x.cols) throw std::invalid_argument("dataset: Z and X must have the same columns");
    if (z.rows < x.rows) throw std::invalid_argument("dataset: Z must have at least n rows");
    if (!all_finite(x) || !all_finite(y) || !all_finite(z))
        throw std::invalid_argument("dataset: non-finite entries");
    if (!(sigma >= 0.0) || !std::isfinite(sigma))
        throw std::invalid_argument("dataset: sigma must be finite and >= 0");
    for (std::size_t i = 0; i < x.rows; ++i)
        for (std::size_t j = 0; j < x.cols; ++j)
            if (z(i, j) != x(i, j))
                throw std::invalid_argument("dataset: rows 1..n of Z must equal X (row " +
                                            std::to_string(i + 1) + " differs)");
    return RegressionDataset{std::move(x), std::move(y), std::move(z), sigma};
}

RegressionDataset make_dataset(Matrix x, Vector y, double sigma) {
    Matrix z = x;
    return make_dataset(std::move(x), std::move(y), std::move(z), sigma);
}

bool columns_normalized(const RegressionDataset& ds, double tol) {
    const double n = static_cast<double>(ds.n());
    for (std::size_t j = 0; j < ds.p(); ++j) {
        double sq = 0.0;
        for (std::size_t i = 0; i < ds.n(); ++i) sq += ds.X(i, j) * ds.X(i, j);
        if (std::fabs(sq / n - 1.0) > tol) return false;
    }
    return true;
}

TargetSpec build_target(const RegressionDataset& ds, Objective objective, const Matrix* custom) {
    TargetSpec spec;
    spec.objective = objective;
    switch (objective) {
        case Objective::transductive: {
            const double scale = std::sqrt(static_cast<double>(ds.n()) / static_cast<double>(ds.m()));
            spec.A = ds.Z;
            for (double& v : spec.A.data) v *= scale;
            break;
        }
        case Objective::denoising:
            spec.A = ds.X;
            break;
        case Objective::estimation: {
            spec.A = Matrix::identity(ds.p());
            const double scale = std::sqrt(static_cast<double>(ds.n()));
            for (double& v : spec.A.data) v *= scale;
            break;
        }
        case Objective::custom:
            if (!custom) throw std::invalid_argument("build_target: custom objective needs a matrix");
            if (custom->cols != ds.p())
                throw std::invalid_argument("build_target: custom A must have p columns");
            spec.A = *custom;
            break;
    }
    return spec;
}

PreliminaryEstimate preliminary_pseudo_ls(const RegressionDataset& ds, const TargetSpec& spec,
                                          double tol) {
    const Matrix g = gram(ds.X);
    const Matrix ginv = pseudo_inverse(g, tol);
    const Vector w = matvec(ginv, matvec_t(ds.X, ds.Y));
    PreliminaryEstimate out;
    out.method = PrelimMethod::pseudo_ls;
    out.value = matvec(spec.A, w);
    return out;
}

PreliminaryEstimate preliminary_ridge(const RegressionDataset& ds, const TargetSpec& spec,
                                      double gamma) {
    if (!(gamma >= 0.0) || !std::isfinite(gamma))
        throw std::invalid_argument("preliminary_ridge: gamma must be finite and >= 0");
    Matrix lhs = gram(ds.X);
    if (gamma > 0.0) {
        const Matrix ata = gram(spec.A);
        for (std::size_t i = 0; i < lhs.data.size(); ++i) lhs.data[i] += gamma * ata.data[i];
    }
    Vector w;
    try {
        w = solve_spd(lhs, matvec_t(ds.X, ds.Y), "preliminary_ridge");
    } catch (const std::runtime_error&) {
        throw std::runtime_error(
            "preliminary_ridge: gamma A'A + X'X is singular; increase gamma");
    }
    PreliminaryEstimate out;
    out.method = PrelimMethod::ridge;
    out.param = gamma;
    out.value = matvec(spec.A, w);
    return out;
}

PreliminaryEstimate preliminary_lasso(const RegressionDataset& ds, const TargetSpec& spec,
                                      double lambda1, const SolverConfig& cfg) {
    const FitResult fit = lasso_fit({ds.X, ds.Y, lambda1}, cfg);
    PreliminaryEstimate out;
    out.method = PrelimMethod::lasso;
    out.param = lambda1;
    out.coef = fit.beta;
    out.solver_status = fit.status;
    out.value = matvec(spec.A, fit.beta);
    return out;
}

PreliminaryEstimate preliminary_identity(const RegressionDataset& ds, const TargetSpec& spec) {
    if (spec.objective != Objective::denoising)
        throw std::invalid_argument("preliminary_identity: only valid when A = X (denoising)");
    PreliminaryEstimate out;
    out.method = PrelimMethod::identity_response;
    out.value = ds.Y;
    return out;
}

PreliminaryEstimate label_preserving_adjust(const RegressionDataset& ds, const TargetSpec& spec,
                                            PreliminaryEstimate prelim) {
    if (spec.objective != Objective::transductive)
        throw std::invalid_argument("label_preserving_adjust: requires a transductive target");
    if (prelim.value.size() != ds.m())
        throw std::invalid_argument("label_preserving_adjust: estimate length must be m");
    const double scale = std::sqrt(static_cast<double>(ds.n()) / static_cast<double>(ds.m()));
    for (std::size_t i = 0; i < ds.n(); ++i) prelim.value[i] = scale * ds.Y[i];
    return prelim;
}

FitResult transductive_lasso(const RegressionDataset&, const TargetSpec& spec,
                             const PreliminaryEstimate& prelim, double lambda2,
                             const SolverConfig& cfg, const Vector* warm_start) {
    if (prelim.value.size() != spec.A.rows)
        throw std::invalid_argument("transductive_lasso: estimate length must match rows of A");
    if (lambda2 == 0.0 && prelim.method == PrelimMethod::lasso) {
        FitResult out;
        out.beta = prelim.coef;
        out.lambda = 0.0;
        out.status = prelim.solver_status;
        out.objective = norm2_sq(sub(prelim.value, matvec(spec.A, out.beta)));
        return out;
    }
    return lasso_fit({spec.A, prelim.value, lambda2}, cfg, warm_start);
}

FitResult transductive_dantzig(const RegressionDataset&, const TargetSpec& spec,
                               const PreliminaryEstimate& prelim, double lambda2,
                               const SolverConfig& cfg) {
    if (prelim.value.size() != spec.A.rows)
        throw std::invalid_argument("transductive_dantzig: estimate length must match rows of A");
    return dantzig_fit({spec.A, prelim.value, lambda2}, cfg);
}

static Matrix rowspace_projector(const RegressionDataset& ds, double tol) {
    const Matrix g = gram(ds.X);
    Matrix proj = matmul(pseudo_inverse(g, tol), g);
    // symmetrize: P = P' holds in exact arithmetic
    for (std::size_t i = 0; i < proj.rows; ++i)
        for (std::size_t j = i + 1; j < proj.cols; ++j) {
            const double v = 0.5 * (proj(i, j) + proj(j, i));
            proj(i, j) = v;
            proj(j, i) = v;
        }
    return proj;
}

Matrix project_onto_rowspace(const RegressionDataset& ds, double tol) {
    return matmul(ds.Z, rowspace_projector(ds, tol));
}

Vector rowspace_representative(const RegressionDataset& ds, const Vector& beta, double tol) {
    if (beta.size() != ds.p())
        throw std::invalid_argument("rowspace_representative: beta length must be p");
    return matvec(rowspace_projector(ds, tol), beta);
}

}  // namespace translasso
