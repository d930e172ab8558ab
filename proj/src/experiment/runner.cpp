#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <random>
#include <thread>

#include "geu/classify.hpp"
#include "geu/errors.hpp"
#include "geu/experiment.hpp"
#include "geu/grid.hpp"
#include "geu/seeding.hpp"
#include "geu/uncertainty.hpp"

namespace geu {

namespace {

// Tags for deriving independent seed streams from the master seed.
enum SeedTag : std::uint64_t {
    kFoldTag = 1,
    kNoiseTag = 2,
    kInnerTag = 3,
    kSizeTag = 4,
    kBoundaryTag = 5,
    kAugTag = 6,
};

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double resolve_floor(const ExperimentConfig& cfg, const Matrix& base, double sigma) {
    if (cfg.floor == "auto") return auto_floor(Matrix(sigma * base.array()));
    return std::stod(cfg.floor);
}

// One training/evaluation split with everything that is reusable across the
// hyperparameter grid cached: standardization, graphs, base scatters and the
// nearest-neighbor uncertainty bases.
class SplitEvaluator {
public:
    SplitEvaluator(const Dataset& train, const Dataset& eval, const ExperimentConfig& cfg)
        : cfg_(cfg) {
        if (cfg.standardize) {
            const ZScoreStats stats = zscore_fit(train);
            train_ = zscore_apply(train, stats);
            eval_ = zscore_apply(eval, stats);
        } else {
            train_ = train;
            eval_ = eval;
        }
        train_mean_ = train_.features.colwise().mean();
        centered_ = train_.features.rowwise() - train_mean_.transpose();
    }

    GridPointScores evaluate(const MethodSpec& spec, double sigma_like,
                             const std::vector<int>& d_grid,
                             const std::vector<int>& k_grid) {
        const GraphPair& graphs = get_graphs(spec.base);
        ScatterAssembly scatters = get_base_scatters(spec.base);

        bool geu = false;
        double sigma_scale = 0.0;
        if (spec.uncertainty != MethodSpec::Uncertainty::None) {
            const Matrix& base =
                get_nn_base(spec.uncertainty == MethodSpec::Uncertainty::Supervised);
            const UncertaintyModel u = scale_uncertainty(
                base, sigma_like, resolve_floor(cfg_, base, sigma_like));
            scatters.a += uncertainty_regularizer(u, graphs.degrees);
            scatters.b += uncertainty_regularizer(u, graphs.penalty_degrees);
            geu = true;
            sigma_scale = sigma_like;
        }

        FitParams params;
        params.k1 = cfg_.k1;
        params.k2 = cfg_.k2;
        params.ridge = spec.rlda ? RidgePolicy::trace_relative(sigma_like)
                                 : RidgePolicy::automatic();

        const EmbeddingModel model = solve_embedding(scatters, train_mean_, spec.base,
                                                     geu, sigma_scale, kAllPositive, params);
        const Matrix train_proj = centered_ * model.projection;
        const Matrix eval_proj =
            (eval_.features.rowwise() - train_mean_.transpose()) * model.projection;

        GridPointScores out;
        out.ridge = model.ridge;
        out.accuracy.assign(d_grid.size(), std::vector<double>(k_grid.size(), kNan));
        for (size_t di = 0; di < d_grid.size(); ++di) {
            const int d = d_grid[di];
            if (d > model.d) continue;  // not enough positive directions
            const auto preds = knn_predict_many(train_proj.leftCols(d), train_.labels,
                                                eval_proj.leftCols(d), k_grid);
            for (size_t ki = 0; ki < k_grid.size(); ++ki) {
                out.accuracy[di][ki] = accuracy(preds[ki], eval_.labels);
            }
        }
        return out;
    }

private:
    const GraphPair& get_graphs(Method m) {
        auto& slot = graphs_[m == Method::Lda ? 0 : 1];
        if (!slot) {
            slot = m == Method::Lda ? lda_graphs(train_.labels)
                                    : mfa_graphs(train_, cfg_.k1, cfg_.k2);
        }
        return *slot;
    }

    const ScatterAssembly& get_base_scatters(Method m) {
        auto& slot = base_[m == Method::Lda ? 0 : 1];
        if (!slot) slot = assemble_scatters(centered_, get_graphs(m), std::nullopt);
        return *slot;
    }

    const Matrix& get_nn_base(bool supervised) {
        auto& slot = nn_base_[supervised ? 1 : 0];
        if (!slot) slot = nearest_neighbor_sq_diffs(train_, supervised);
        return *slot;
    }

    const ExperimentConfig& cfg_;
    Dataset train_, eval_;
    Vector train_mean_;
    Matrix centered_;
    std::optional<GraphPair> graphs_[2];
    std::optional<ScatterAssembly> base_[2];
    std::optional<Matrix> nn_base_[2];
};

std::vector<double> sigma_axis(const MethodSpec& spec, const ExperimentConfig& cfg) {
    if (spec.rlda) return cfg.rlda_ridge_grid;
    if (spec.uncertainty != MethodSpec::Uncertainty::None) return cfg.sigma_grid;
    return {0.0};
}

struct Selected {
    double sigma_like = 0.0;
    int d = 0;
    int k = 0;
};

// Inner cross-validation over (sigma, d, k), jointly by mean accuracy; ties
// go to the smallest d, then sigma, then k. A combination must be valid in
// every inner fold to qualify.
Selected select_hyperparameters(const Dataset& train_raw, const MethodSpec& spec,
                                const ExperimentConfig& cfg, std::uint64_t seed) {
    FoldSplit split;
    try {
        split = kfold(train_raw, cfg.inner_folds, seed, cfg.stratified);
    } catch (const ClassTooSmall&) {
        split = kfold(train_raw, cfg.inner_folds, seed, false);
    }

    const auto sigmas = sigma_axis(spec, cfg);
    const size_t ns = sigmas.size(), nd = cfg.d_grid.size(), nk = cfg.k_grid.size();
    std::vector<double> sum(ns * nd * nk, 0.0);
    std::vector<char> valid(ns * nd * nk, 1);

    for (int g = 0; g < cfg.inner_folds; ++g) {
        const Dataset itrain = train_raw.subset(split.complement_indices(g));
        const Dataset ival = train_raw.subset(split.fold_indices(g));
        SplitEvaluator evaluator(itrain, ival, cfg);
        for (size_t si = 0; si < ns; ++si) {
            bool point_ok = true;
            GridPointScores scores;
            try {
                scores = evaluator.evaluate(spec, sigmas[si], cfg.d_grid, cfg.k_grid);
            } catch (const NumericalError&) {
                point_ok = false;
            }
            for (size_t di = 0; di < nd; ++di) {
                for (size_t ki = 0; ki < nk; ++ki) {
                    const size_t idx = (si * nd + di) * nk + ki;
                    const double a = point_ok ? scores.accuracy[di][ki] : kNan;
                    if (std::isnan(a)) {
                        valid[idx] = 0;
                    } else {
                        sum[idx] += a;
                    }
                }
            }
        }
    }

    Selected best;
    double best_acc = -1.0;
    bool found = false;
    for (size_t si = 0; si < ns; ++si) {
        for (size_t di = 0; di < nd; ++di) {
            for (size_t ki = 0; ki < nk; ++ki) {
                const size_t idx = (si * nd + di) * nk + ki;
                if (!valid[idx]) continue;
                const double acc = sum[idx] / cfg.inner_folds;
                const int d = cfg.d_grid[di];
                const int k = cfg.k_grid[ki];
                const bool better =
                    !found || acc > best_acc ||
                    (acc == best_acc &&
                     (d < best.d ||
                      (d == best.d && (sigmas[si] < best.sigma_like ||
                                       (sigmas[si] == best.sigma_like && k < best.k)))));
                if (better) {
                    best = {sigmas[si], d, k};
                    best_acc = acc;
                    found = true;
                }
            }
        }
    }
    if (!found) {
        throw NumericalError("no valid hyperparameter combination for " + spec.name);
    }
    return best;
}

void validate_against_data(const ExperimentConfig& cfg, const Dataset& data) {
    for (int d : cfg.d_grid) {
        if (d > data.dim()) {
            throw ConfigError("d_grid entry " + std::to_string(d) +
                              " exceeds feature dimension " + std::to_string(data.dim()));
        }
    }
    if (cfg.folds > data.n()) throw ConfigError("folds exceed sample count");
}

// Work item: one (cell, repeat) pair evaluated over all outer folds.
struct Task {
    size_t cell = 0;
    size_t method = 0;
    size_t axis = 0;  // noise or size index
    int repeat = 0;
};

struct TaskResult {
    std::vector<FoldOutcome> outcomes;
    std::string error;
    bool failed = false;
    double wall_seconds = 0.0;
};

void run_tasks(const std::vector<Task>& tasks,
               const std::function<TaskResult(const Task&)>& body, int threads,
               std::vector<TaskResult>& results) {
    results.assign(tasks.size(), {});
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            const auto start = std::chrono::steady_clock::now();
            TaskResult r;
            try {
                r = body(tasks[i]);
            } catch (const Error& e) {
                r.failed = true;
                r.error = e.what();
            }
            r.wall_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                    .count();
            results[i] = std::move(r);
        }
    };
    const int nthreads = std::max(1, std::min<int>(threads, static_cast<int>(tasks.size())));
    if (nthreads == 1) {
        worker();
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

}  // namespace

GridPointScores evaluate_grid_point(const Dataset& train, const Dataset& eval,
                                    const MethodSpec& spec, double sigma_like,
                                    const std::vector<int>& d_grid,
                                    const std::vector<int>& k_grid,
                                    const ExperimentConfig& cfg) {
    SplitEvaluator evaluator(train, eval, cfg);
    return evaluator.evaluate(spec, sigma_like, d_grid, k_grid);
}

Dataset load_experiment_dataset(const ExperimentConfig& cfg) {
    if (cfg.dataset.empty()) throw ConfigError("config key 'dataset' is required");
    if (cfg.dataset == "synthetic") {
        return synthetic_two_class(cfg.boundary_points, cfg.boundary_separation,
                                   cfg.boundary_spread, mix_seed({cfg.seed, kBoundaryTag}));
    }
    LoadOptions opts;
    opts.label_column = cfg.label_column;
    opts.delimiter = cfg.delimiter[0];
    opts.has_header = cfg.has_header;
    opts.drop_columns = cfg.drop_columns;
    return load_csv(cfg.dataset, opts);
}

ExperimentReport run_compare(const ExperimentConfig& cfg, const Dataset& data) {
    validate_against_data(cfg, data);

    std::vector<MethodSpec> specs;
    for (const auto& m : cfg.methods) specs.push_back(parse_method(m));

    std::vector<FoldSplit> splits;
    splits.reserve(static_cast<size_t>(cfg.repeats));
    for (int r = 0; r < cfg.repeats; ++r) {
        splits.push_back(kfold(data, cfg.folds, mix_seed({cfg.seed, kFoldTag,
                                                          static_cast<std::uint64_t>(r)}),
                               cfg.stratified));
    }

    ExperimentReport report;
    report.axis_name = "noise";
    std::vector<Task> tasks;
    for (size_t mi = 0; mi < specs.size(); ++mi) {
        for (size_t vi = 0; vi < cfg.noise_levels.size(); ++vi) {
            ReportCell cell;
            cell.method = specs[mi].name;
            cell.axis = cfg.noise_levels[vi];
            report.cells.push_back(cell);
            for (int r = 0; r < cfg.repeats; ++r) {
                tasks.push_back({report.cells.size() - 1, mi, vi, r});
            }
        }
    }

    auto body = [&](const Task& task) {
        const MethodSpec& spec = specs[task.method];
        const double noise = cfg.noise_levels[task.axis];
        const auto r = static_cast<std::uint64_t>(task.repeat);
        const Dataset noisy =
            add_noise(data, noise, mix_seed({cfg.seed, kNoiseTag, r, task.axis}));
        const FoldSplit& split = splits[static_cast<size_t>(task.repeat)];

        TaskResult result;
        for (int f = 0; f < cfg.folds; ++f) {
            const Dataset train_raw = noisy.subset(split.complement_indices(f));
            const Dataset test_raw =
                (cfg.noise_on_test ? noisy : data).subset(split.fold_indices(f));
            const Selected sel = select_hyperparameters(
                train_raw, spec, cfg,
                mix_seed({cfg.seed, kInnerTag, r, task.axis, static_cast<std::uint64_t>(f)}));
            SplitEvaluator evaluator(train_raw, test_raw, cfg);
            const GridPointScores scores =
                evaluator.evaluate(spec, sel.sigma_like, {sel.d}, {sel.k});
            if (std::isnan(scores.accuracy[0][0])) {
                throw NumericalError("final fit lost the selected dimension");
            }
            result.outcomes.push_back({task.repeat, f, scores.accuracy[0][0],
                                       sel.sigma_like, sel.d, sel.k, scores.ridge});
        }
        return result;
    };

    std::vector<TaskResult> results;
    run_tasks(tasks, body, cfg.threads, results);

    for (size_t i = 0; i < tasks.size(); ++i) {
        ReportCell& cell = report.cells[tasks[i].cell];
        cell.wall_seconds += results[i].wall_seconds;
        if (results[i].failed) {
            cell.failed = true;
            if (!cell.error.empty()) cell.error += "; ";
            cell.error += "repeat " + std::to_string(tasks[i].repeat) + ": " +
                          results[i].error;
        }
        for (const auto& o : results[i].outcomes) cell.raw.push_back(o);
    }
    for (auto& cell : report.cells) cell.finalize();
    return report;
}

ExperimentReport run_compare(const ExperimentConfig& cfg) {
    return run_compare(cfg, load_experiment_dataset(cfg));
}

ExperimentReport run_size_curve(const ExperimentConfig& cfg, const Dataset& data) {
    validate_against_data(cfg, data);
    if (cfg.train_sizes.empty()) {
        throw ConfigError("size-curve runs need a nonempty train_sizes list");
    }

    std::vector<MethodSpec> specs;
    for (const auto& m : cfg.methods) specs.push_back(parse_method(m));

    std::vector<FoldSplit> splits;
    for (int r = 0; r < cfg.repeats; ++r) {
        splits.push_back(kfold(data, cfg.folds, mix_seed({cfg.seed, kFoldTag,
                                                          static_cast<std::uint64_t>(r)}),
                               cfg.stratified));
    }

    ExperimentReport report;
    report.axis_name = "train_size";
    std::vector<Task> tasks;
    for (size_t mi = 0; mi < specs.size(); ++mi) {
        for (size_t si = 0; si < cfg.train_sizes.size(); ++si) {
            ReportCell cell;
            cell.method = specs[mi].name;
            cell.axis = cfg.train_sizes[si];
            report.cells.push_back(cell);
            for (int r = 0; r < cfg.repeats; ++r) {
                tasks.push_back({report.cells.size() - 1, mi, si, r});
            }
        }
    }

    auto body = [&](const Task& task) {
        const MethodSpec& spec = specs[task.method];
        const int size = cfg.train_sizes[task.axis];
        const auto r = static_cast<std::uint64_t>(task.repeat);
        const FoldSplit& split = splits[static_cast<size_t>(task.repeat)];

        // Fold 0 is the fixed test set; the rest is the training pool.
        const Dataset test_raw = data.subset(split.fold_indices(0));
        const Dataset pool = data.subset(split.complement_indices(0));
        if (size > pool.n()) {
            throw SizeTooLarge("training size " + std::to_string(size) +
                               " exceeds pool of " + std::to_string(pool.n()));
        }
        const auto sub =
            stratified_subsample(pool, size, mix_seed({cfg.seed, kSizeTag, r, task.axis}));
        const Dataset train_raw = pool.subset(sub);

        const Selected sel = select_hyperparameters(
            train_raw, spec, cfg, mix_seed({cfg.seed, kInnerTag, r, task.axis}));
        SplitEvaluator evaluator(train_raw, test_raw, cfg);
        const GridPointScores scores =
            evaluator.evaluate(spec, sel.sigma_like, {sel.d}, {sel.k});
        if (std::isnan(scores.accuracy[0][0])) {
            throw NumericalError("final fit lost the selected dimension");
        }
        TaskResult result;
        result.outcomes.push_back({task.repeat, 0, scores.accuracy[0][0], sel.sigma_like,
                                   sel.d, sel.k, scores.ridge});
        return result;
    };

    std::vector<TaskResult> results;
    run_tasks(tasks, body, cfg.threads, results);

    for (size_t i = 0; i < tasks.size(); ++i) {
        ReportCell& cell = report.cells[tasks[i].cell];
        cell.wall_seconds += results[i].wall_seconds;
        if (results[i].failed) {
            cell.failed = true;
            if (!cell.error.empty()) cell.error += "; ";
            cell.error += "repeat " + std::to_string(tasks[i].repeat) + ": " +
                          results[i].error;
        }
        for (const auto& o : results[i].outcomes) cell.raw.push_back(o);
    }
    for (auto& cell : report.cells) cell.finalize();
    return report;
}

ExperimentReport run_size_curve(const ExperimentConfig& cfg) {
    return run_size_curve(cfg, load_experiment_dataset(cfg));
}

Dataset augment_dataset(const Dataset& x, const UncertaintyModel& u,
                        int total_replicates, std::uint64_t seed) {
    if (total_replicates < 0) throw DataError("augment_dataset: negative replicate count");
    if (u.diag_covs.rows() != x.features.rows() ||
        u.diag_covs.cols() != x.features.cols()) {
        throw ShapeMismatch("augment_dataset: uncertainty shape mismatch");
    }
    const int n = x.n();
    const int dim = x.dim();

    Dataset out = x;
    out.features.conservativeResize(n + total_replicates, dim);
    out.labels.reserve(static_cast<size_t>(n + total_replicates));

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    int row = n;
    for (int i = 0; i < n; ++i) {
        const int reps = total_replicates / n + (i < total_replicates % n ? 1 : 0);
        for (int t = 0; t < reps; ++t) {
            for (int j = 0; j < dim; ++j) {
                out.features(row, j) =
                    x.features(i, j) + std::sqrt(u.diag_covs(i, j)) * gauss(rng);
            }
            out.labels.push_back(x.labels[static_cast<size_t>(i)]);
            ++row;
        }
    }
    return out;
}

void run_boundary(const ExperimentConfig& cfg, const std::string& out_dir) {
    const Dataset train =
        cfg.dataset.empty() || cfg.dataset == "synthetic"
            ? synthetic_two_class(cfg.boundary_points, cfg.boundary_separation,
                                  cfg.boundary_spread, mix_seed({cfg.seed, kBoundaryTag}))
            : load_experiment_dataset(cfg);
    if (train.dim() != 2) {
        throw NotTwoDimensional("boundary runs need a 2-D dataset, got D = " +
                                std::to_string(train.dim()));
    }

    const Matrix base =
        nearest_neighbor_sq_diffs(train, cfg.boundary_estimator == "supervised");
    const UncertaintyModel u = scale_uncertainty(
        base, cfg.boundary_sigma, resolve_floor(cfg, base, cfg.boundary_sigma));

    GridBounds bounds;
    const double x0 = train.features.col(0).minCoeff(), x1 = train.features.col(0).maxCoeff();
    const double y0 = train.features.col(1).minCoeff(), y1 = train.features.col(1).maxCoeff();
    const double padx = 0.2 * (x1 - x0), pady = 0.2 * (y1 - y0);
    bounds = {x0 - padx, x1 + padx, y0 - pady, y1 + pady};

    FitParams params;
    params.k1 = cfg.k1;
    params.k2 = cfg.k2;

    std::filesystem::create_directories(out_dir);
    auto emit = [&](const Dataset& tr, const std::optional<UncertaintyModel>& unc,
                    const std::string& name) {
        const EmbeddingModel model = fit(tr, Method::Mfa, unc, cfg.boundary_d, params);
        const KnnModel knn{project(model, tr), tr.labels, cfg.boundary_k};
        save_grid_csv(decision_grid(model, knn, bounds, cfg.boundary_resolution),
                      out_dir + "/grid_" + name + ".csv");
    };

    emit(train, std::nullopt, "MFA");
    emit(train, u, "GEU-MFA");
    for (int m : cfg.boundary_m) {
        const Dataset aug = augment_dataset(
            train, u, m, mix_seed({cfg.seed, kAugTag, static_cast<std::uint64_t>(m)}));
        emit(aug, std::nullopt, "MFA-" + std::to_string(m));
    }
}

}  // namespace geu
