#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "geu/data.hpp"
#include "geu/embedding.hpp"

namespace geu {

// Flat key=value configuration; every key has a default and unknown keys are
// hard errors. Lists are comma separated.
struct ExperimentConfig {
    // dataset
    std::string dataset;  // CSV path, or "synthetic" for the blob generator
    std::string label_column = "label";
    std::vector<std::string> drop_columns;
    std::string delimiter = ",";
    bool has_header = true;
    bool standardize = true;
    bool stratified = true;
    bool noise_on_test = false;

    // protocol
    std::vector<std::string> methods = {"LDA",       "RLDA",      "MFA",
                                        "GEU-LDA-U", "GEU-LDA-S", "GEU-MFA-U",
                                        "GEU-MFA-S"};
    std::vector<double> sigma_grid = {0.001, 0.1, 0.2, 0.4, 0.8, 1.0, 2.0};
    std::vector<int> d_grid = {1, 2, 4, 8};
    std::vector<int> k_grid = {1, 3, 5};
    std::vector<double> rlda_ridge_grid = {1e-4, 1e-3, 1e-2, 1e-1};
    int k1 = 5;
    int k2 = 20;
    std::vector<double> noise_levels = {0.0, 0.1, 0.2};
    int folds = 5;
    int inner_folds = 3;
    int repeats = 10;
    std::uint64_t seed = 42;
    int threads = 1;
    std::string floor = "auto";  // variance floor: "auto" or a number

    // size-curve
    std::vector<int> train_sizes;

    // single-shot fit / project / estimate-uncertainty
    std::string fit_method = "LDA";
    double fit_sigma = 1.0;
    int fit_d = 1;
    std::string model_path;
    std::string uncertainty_estimator = "supervised";  // or "unsupervised"
    double uncertainty_sigma = 1.0;

    // boundary export
    int boundary_points = 100;  // per class
    double boundary_separation = 2.0;
    double boundary_spread = 1.0;
    double boundary_sigma = 1.0;
    std::string boundary_estimator = "supervised";
    std::vector<int> boundary_m = {100, 1000};
    int boundary_resolution = 200;
    int boundary_k = 1;
    int boundary_d = 1;
};

ExperimentConfig parse_config_string(const std::string& text, const std::string& origin);
ExperimentConfig parse_config_file(const std::string& path);

struct MethodSpec {
    std::string name;
    Method base = Method::Lda;
    enum class Uncertainty { None, Unsupervised, Supervised } uncertainty =
        Uncertainty::None;
    bool rlda = false;
};

MethodSpec parse_method(const std::string& name);

struct FoldOutcome {
    int repeat = 0;
    int fold = 0;
    double accuracy = 0.0;
    double sigma = 0.0;  // selected sigma (or RLDA ridge multiplier)
    int d = 0;
    int k = 0;
    double ridge = 0.0;  // effective absolute ridge of the final fit
};

// One (method, axis value) cell; axis is the noise level for compare runs
// and the training size for size-curve runs.
struct ReportCell {
    std::string method;
    double axis = 0.0;
    std::vector<FoldOutcome> raw;
    double mean = 0.0;      // mean of per-repeat means
    double variance = 0.0;  // population variance of per-repeat means
    bool failed = false;
    std::string error;
    double wall_seconds = 0.0;

    void finalize();  // computes mean/variance from raw
};

struct ExperimentReport {
    std::string axis_name = "noise";
    std::vector<ReportCell> cells;

    const ReportCell* find(const std::string& method, double axis) const;
    // Writes report.csv, report_raw.csv, report.md (deterministic) and
    // timings.csv (wall clock, excluded from determinism guarantees).
    void write(const std::string& out_dir) const;
};

Dataset load_experiment_dataset(const ExperimentConfig& cfg);

ExperimentReport run_compare(const ExperimentConfig& cfg, const Dataset& data);
ExperimentReport run_compare(const ExperimentConfig& cfg);

ExperimentReport run_size_curve(const ExperimentConfig& cfg, const Dataset& data);
ExperimentReport run_size_curve(const ExperimentConfig& cfg);

// Decision grids for MFA, GEU-MFA and MFA on augmented data; one CSV per
// method under out_dir.
void run_boundary(const ExperimentConfig& cfg, const std::string& out_dir);

// total_replicates Gaussian draws spread round-robin over the parents,
// appended to the original samples with inherited labels.
Dataset augment_dataset(const Dataset& x, const UncertaintyModel& u,
                        int total_replicates, std::uint64_t seed);

// Single train/eval evaluation used by both the inner model selection and
// the outer folds: fits `spec` at one grid point and scores every (d, k).
// Entries for d values above the usable direction count are NaN.
struct GridPointScores {
    std::vector<std::vector<double>> accuracy;  // [d_index][k_index]
    double ridge = 0.0;
};

GridPointScores evaluate_grid_point(const Dataset& train, const Dataset& eval,
                                    const MethodSpec& spec, double sigma_like,
                                    const std::vector<int>& d_grid,
                                    const std::vector<int>& k_grid,
                                    const ExperimentConfig& cfg);

}  // namespace geu
