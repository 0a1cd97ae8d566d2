#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "translasso/assumptions.hpp"
#include "translasso/harness.hpp"

namespace translasso {

// Raised for unreadable or invalid config files (exit code 2 in the CLI, as
// opposed to data errors, which exit 3).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// CSV layout: RFC-4180-style with '.' decimal separator, one header row
// (j1..jp for a p-column matrix), values written with 17 significant digits
// so a save/load round trip is exact. Vectors are one-column matrices.
void save_matrix_csv(const std::string& path, const Matrix& m);
Matrix load_matrix_csv(const std::string& path);
void save_vector_csv(const std::string& path, const Vector& v);
Vector load_vector_csv(const std::string& path);

std::string format_double(double v);  // 17 significant digits, locale-free

// Loads X/Y (and optionally Z). Without a Z file, Z = X. A provided Z must
// carry X as its first n rows unless `stack` asks for Z = [X; Z_file].
// Parse and consistency problems throw std::runtime_error with file, row and
// column coordinates.
RegressionDataset load_dataset(const std::string& x_path, const std::string& y_path,
                               const std::optional<std::string>& z_path, double sigma,
                               bool stack = false);

void save_dataset(const std::string& dir, const RegressionDataset& ds,
                  const Vector* beta_star = nullptr);

struct OutputPaths {
    std::string records_csv;
    std::string summary_json;
    std::string curve_csv;
};

struct ExperimentConfig {
    SynthConfig synth;
    std::size_t replications = 100;
    GridParams grid;
    std::string objectives = "ZXI";  // which PERF columns the table row shows
    double eta = 0.1;
    OutputPaths output;
};

ExperimentConfig load_experiment_config(const std::string& path);

struct BoundsConfig {
    SynthConfig synth;
    bool normalize = true;
    Objective objective = Objective::denoising;
    PrelimMethod prelim = PrelimMethod::identity_response;
    double prelim_param = 0.0;
    double eta = 0.1;
    std::size_t mc_reps = 1000;
    std::size_t check_reps = 500;
    BoundTheorem theorem = BoundTheorem::dantzig_thm1;
    ConeBudget cone;
};

BoundsConfig load_bounds_config(const std::string& path);

void save_records_csv(const std::string& path, const std::vector<PerfRecord>& records);
void save_summary_json(const std::string& path, const ExperimentConfig& cfg,
                       const PerfSummary& summary);
// Curve rows plus '#'-prefixed footer lines carrying the two argmin lambdas.
void save_curve_csv(const std::string& path, const ErrorCurve& curve);

std::string summary_table_row(const ExperimentConfig& cfg, const PerfSummary& summary);

}  // namespace translasso
