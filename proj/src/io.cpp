#include "translasso/io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace translasso {

using nlohmann::json;

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // binary: no platform newline games
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    cells.push_back(cur);
    return cells;
}

double parse_cell(const std::string& cell, const std::string& path, std::size_t row,
                  std::size_t col) {
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    while (first != last && (*first == ' ' || *first == '\t')) ++first;
    while (last != first && (last[-1] == ' ' || last[-1] == '\t')) --last;
    double value = 0.0;
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc{} || res.ptr != last)
        throw std::runtime_error(path + ": row " + std::to_string(row) + ", column " +
                                 std::to_string(col) + ": cannot parse '" + cell + "'");
    if (!std::isfinite(value))
        throw std::runtime_error(path + ": row " + std::to_string(row) + ", column " +
                                 std::to_string(col) + ": non-finite value");
    return value;
}

}  // namespace

void save_matrix_csv(const std::string& path, const Matrix& m) {
    std::ofstream out = open_out(path);
    for (std::size_t j = 0; j < m.cols; ++j) out << (j ? ",j" : "j") << (j + 1);
    out << "\n";
    for (std::size_t i = 0; i < m.rows; ++i) {
        for (std::size_t j = 0; j < m.cols; ++j) {
            if (j) out << ',';
            out << format_double(m(i, j));
        }
        out << "\n";
    }
}

Matrix load_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open");
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    const std::size_t cols = split_csv_line(line).size();

    std::vector<double> values;
    std::size_t rows = 0;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != cols)
            throw std::runtime_error(path + ": row " + std::to_string(lineno) + " has " +
                                     std::to_string(cells.size()) + " cells, expected " +
                                     std::to_string(cols));
        for (std::size_t j = 0; j < cols; ++j)
            values.push_back(parse_cell(cells[j], path, lineno, j + 1));
        ++rows;
    }
    if (rows == 0) throw std::runtime_error(path + ": no data rows");
    Matrix m(rows, cols);
    m.data = std::move(values);
    return m;
}

void save_vector_csv(const std::string& path, const Vector& v) {
    Matrix m(v.size(), 1);
    for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
    save_matrix_csv(path, m);
}

Vector load_vector_csv(const std::string& path) {
    const Matrix m = load_matrix_csv(path);
    if (m.cols != 1) throw std::runtime_error(path + ": expected a single column");
    return m.data;
}

RegressionDataset load_dataset(const std::string& x_path, const std::string& y_path,
                               const std::optional<std::string>& z_path, double sigma,
                               bool stack) {
    Matrix x = load_matrix_csv(x_path);
    Vector y = load_vector_csv(y_path);
    if (y.size() != x.rows)
        throw std::runtime_error(y_path + ": has " + std::to_string(y.size()) + " rows but " +
                                 x_path + " has " + std::to_string(x.rows));
    if (!z_path) {
        try {
            return make_dataset(std::move(x), std::move(y), sigma);
        } catch (const std::invalid_argument& e) {
            throw std::runtime_error(std::string("dataset: ") + e.what());
        }
    }

    Matrix zfile = load_matrix_csv(*z_path);
    if (zfile.cols != x.cols)
        throw std::runtime_error(*z_path + ": has " + std::to_string(zfile.cols) +
                                 " columns but " + x_path + " has " + std::to_string(x.cols));
    Matrix z;
    if (stack) {
        z = Matrix(x.rows + zfile.rows, x.cols);
        for (std::size_t i = 0; i < x.rows; ++i)
            for (std::size_t j = 0; j < x.cols; ++j) z(i, j) = x(i, j);
        for (std::size_t i = 0; i < zfile.rows; ++i)
            for (std::size_t j = 0; j < x.cols; ++j) z(x.rows + i, j) = zfile(i, j);
    } else {
        if (zfile.rows < x.rows)
            throw std::runtime_error(*z_path + ": fewer rows than X; pass --stack to append " +
                                     "unlabeled rows below X");
        for (std::size_t i = 0; i < x.rows; ++i)
            for (std::size_t j = 0; j < x.cols; ++j)
                if (zfile(i, j) != x(i, j))
                    throw std::runtime_error(*z_path + ": row " + std::to_string(i + 2) +
                                             " does not match X (use --stack if the file holds " +
                                             "only the unlabeled rows)");
        z = std::move(zfile);
    }
    try {
        return make_dataset(std::move(x), std::move(y), std::move(z), sigma);
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(std::string("dataset: ") + e.what());
    }
}

void save_dataset(const std::string& dir, const RegressionDataset& ds, const Vector* beta_star) {
    std::filesystem::create_directories(dir);
    const std::filesystem::path base(dir);
    save_matrix_csv((base / "X.csv").string(), ds.X);
    save_vector_csv((base / "Y.csv").string(), ds.Y);
    save_matrix_csv((base / "Z.csv").string(), ds.Z);
    if (beta_star) save_vector_csv((base / "beta_star.csv").string(), *beta_star);
    json meta;
    meta["n"] = ds.n();
    meta["m"] = ds.m();
    meta["p"] = ds.p();
    meta["sigma"] = ds.sigma;
    std::ofstream out = open_out((base / "meta.json").string());
    out << meta.dump(2) << "\n";
}

namespace {

SynthConfig parse_synth(const json& j) {
    SynthConfig cfg;
    cfg.p = j.at("p").get<std::size_t>();
    cfg.s = j.at("s").get<std::size_t>();
    cfg.n = j.at("n").get<std::size_t>();
    cfg.m = j.at("m").get<std::size_t>();
    cfg.rho = j.at("rho").get<double>();
    cfg.sigma2 = j.at("sigma2").get<double>();
    cfg.beta_value = j.value("beta_value", 5.0);
    cfg.seed = j.value("seed", std::uint64_t{0});
    validate(cfg);
    return cfg;
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(path + ": " + std::string(e.what()));
    }
    return j;
}

}  // namespace

ExperimentConfig load_experiment_config(const std::string& path) {
    const json j = load_json(path);
    ExperimentConfig cfg;
    try {
        cfg.synth = parse_synth(j.at("synth"));
        cfg.replications = j.value("replications", std::size_t{100});
        if (cfg.replications == 0) throw std::runtime_error("replications must be >= 1");
        if (j.contains("grid")) {
            const json& g = j.at("grid");
            cfg.grid.k = g.value("K", std::size_t{100});
            cfg.grid.eps = g.value("eps", 1e-3);
            cfg.grid.coarse_lambda1 = g.value("coarse_lambda1", false);
            cfg.grid.k1 = g.value("K1", std::size_t{10});
        }
        if (j.contains("objectives")) {
            cfg.objectives.clear();
            for (const auto& o : j.at("objectives")) cfg.objectives += o.get<std::string>();
        }
        cfg.eta = j.value("eta", 0.1);
        if (!(cfg.eta > 0.0 && cfg.eta < 1.0)) throw std::runtime_error("eta must be in (0,1)");
        if (j.contains("output")) {
            const json& o = j.at("output");
            cfg.output.records_csv = o.value("records_csv", "");
            cfg.output.summary_json = o.value("summary_json", "");
            cfg.output.curve_csv = o.value("curve_csv", "");
        }
    } catch (const json::exception& e) {
        throw ConfigError(path + ": " + std::string(e.what()));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path + ": " + std::string(e.what()));
    } catch (const std::runtime_error& e) {
        throw ConfigError(path + ": " + std::string(e.what()));
    }
    return cfg;
}

BoundsConfig load_bounds_config(const std::string& path) {
    const json j = load_json(path);
    BoundsConfig cfg;
    try {
        cfg.synth = parse_synth(j.at("synth"));
        cfg.normalize = j.value("normalize", true);
        const std::string obj = j.value("objective", "denoising");
        if (obj == "transductive")
            cfg.objective = Objective::transductive;
        else if (obj == "denoising")
            cfg.objective = Objective::denoising;
        else if (obj == "estimation")
            cfg.objective = Objective::estimation;
        else
            throw std::runtime_error("unknown objective '" + obj + "'");
        if (j.contains("preliminary")) {
            const json& p = j.at("preliminary");
            const std::string method = p.value("method", "identity_response");
            if (method == "pseudo_ls")
                cfg.prelim = PrelimMethod::pseudo_ls;
            else if (method == "ridge")
                cfg.prelim = PrelimMethod::ridge;
            else if (method == "lasso")
                cfg.prelim = PrelimMethod::lasso;
            else if (method == "identity_response")
                cfg.prelim = PrelimMethod::identity_response;
            else
                throw std::runtime_error("unknown preliminary method '" + method + "'");
            cfg.prelim_param = p.value("param", 0.0);
        }
        cfg.eta = j.value("eta", 0.1);
        if (!(cfg.eta > 0.0 && cfg.eta < 1.0)) throw std::runtime_error("eta must be in (0,1)");
        cfg.mc_reps = j.value("mc_reps", std::size_t{1000});
        cfg.check_reps = j.value("check_reps", std::size_t{500});
        const std::string thm = j.value("theorem", "dantzig_thm1");
        if (thm == "dantzig_thm1")
            cfg.theorem = BoundTheorem::dantzig_thm1;
        else if (thm == "lasso_thm2")
            cfg.theorem = BoundTheorem::lasso_thm2;
        else if (thm == "corollary1")
            cfg.theorem = BoundTheorem::corollary1;
        else
            throw std::runtime_error("unknown theorem '" + thm + "'");
        if (j.contains("cone")) {
            const json& c = j.at("cone");
            cfg.cone.directions = c.value("directions", std::size_t{10000});
            cfg.cone.grad_steps = c.value("grad_steps", std::size_t{100});
            cfg.cone.exhaustive_max_p = c.value("exhaustive_max_p", std::size_t{8});
            cfg.cone.seed = c.value("seed", std::uint64_t{20240901});
        }
    } catch (const json::exception& e) {
        throw ConfigError(path + ": " + std::string(e.what()));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path + ": " + std::string(e.what()));
    } catch (const std::runtime_error& e) {
        throw ConfigError(path + ": " + std::string(e.what()));
    }
    return cfg;
}

void save_records_csv(const std::string& path, const std::vector<PerfRecord>& records) {
    std::ofstream out = open_out(path);
    out << "replication,seed,perf_z,perf_x,perf_i,lasso_lambda_z,lasso_lambda_x,lasso_lambda_i,"
           "tl_lambda1_z,tl_lambda2_z,tl_lambda1_x,tl_lambda2_x,tl_lambda1_i,tl_lambda2_i,"
           "failed_cells\n";
    for (const PerfRecord& r : records) {
        out << r.replication_index << ',' << r.seed << ',' << format_double(r.perf_z) << ','
            << format_double(r.perf_x) << ',' << format_double(r.perf_i) << ','
            << format_double(r.lasso_lambda_z) << ',' << format_double(r.lasso_lambda_x) << ','
            << format_double(r.lasso_lambda_i) << ',' << format_double(r.tl_lambda1_z) << ','
            << format_double(r.tl_lambda2_z) << ',' << format_double(r.tl_lambda1_x) << ','
            << format_double(r.tl_lambda2_x) << ',' << format_double(r.tl_lambda1_i) << ','
            << format_double(r.tl_lambda2_i) << ',' << r.failed_cells << "\n";
    }
}

namespace {

json stats_json(const PerfStats& s) {
    return json{{"mean", s.mean}, {"median", s.median}, {"q03", s.q03}};
}

}  // namespace

void save_summary_json(const std::string& path, const ExperimentConfig& cfg,
                       const PerfSummary& summary) {
    json j;
    j["config"]["synth"] = {{"p", cfg.synth.p},     {"s", cfg.synth.s},
                            {"n", cfg.synth.n},     {"m", cfg.synth.m},
                            {"rho", cfg.synth.rho}, {"sigma2", cfg.synth.sigma2},
                            {"beta_value", cfg.synth.beta_value}, {"seed", cfg.synth.seed}};
    j["config"]["grid"] = {{"K", cfg.grid.k},
                           {"eps", cfg.grid.eps},
                           {"coarse_lambda1", cfg.grid.coarse_lambda1},
                           {"K1", cfg.grid.k1}};
    j["config"]["replications"] = cfg.replications;
    j["replications"] = summary.replications;
    j["perf"]["Z"] = stats_json(summary.z);
    j["perf"]["X"] = stats_json(summary.x);
    j["perf"]["I"] = stats_json(summary.i);
    std::ofstream out = open_out(path);
    out << j.dump(2) << "\n";
}

void save_curve_csv(const std::string& path, const ErrorCurve& curve) {
    std::ofstream out = open_out(path);
    out << "lambda,denoise_err,transduct_err,support_correct\n";
    for (const ErrorCurveRow& row : curve.rows) {
        out << format_double(row.lambda) << ',' << format_double(row.denoise_err) << ','
            << format_double(row.transduct_err) << ',' << (row.support_correct ? 1 : 0) << "\n";
    }
    out << "# argmin_denoise_lambda," << format_double(curve.argmin_denoise_lambda) << "\n";
    out << "# argmin_transduct_lambda," << format_double(curve.argmin_transduct_lambda) << "\n";
}

std::string summary_table_row(const ExperimentConfig& cfg, const PerfSummary& summary) {
    std::ostringstream out;
    auto fixed2 = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2f", v);
        return std::string(buf);
    };
    out << "p=" << cfg.synth.p << " s=" << cfg.synth.s << " (n,m)=(" << cfg.synth.n << ","
        << cfg.synth.m << ") rho=" << cfg.synth.rho << " sigma2=" << cfg.synth.sigma2;
    const struct {
        char tag;
        const PerfStats* stats;
    } parts[] = {{'Z', &summary.z}, {'X', &summary.x}, {'I', &summary.i}};
    for (const auto& part : parts) {
        if (cfg.objectives.find(part.tag) == std::string::npos) continue;
        out << " | PERF(" << part.tag << ") mean=" << fixed2(part.stats->mean)
            << " med=" << fixed2(part.stats->median) << " q03=" << fixed2(part.stats->q03);
    }
    return out.str();
}

}  // namespace translasso
