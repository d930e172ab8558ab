#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "geu/classify.hpp"
#include "geu/errors.hpp"
#include "geu/experiment.hpp"
#include "geu/kernels.hpp"
#include "geu/uncertainty.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
};

void add_common(CLI::App* sub, CommonArgs& args) {
    sub->add_option("--config", args.config_path, "experiment config file")->required();
    sub->add_option("--seed", args.seed, "override the config seed");
    sub->add_option("--out", args.out_dir, "output directory");
    sub->add_option("--threads", args.threads, "worker thread count");
}

geu::ExperimentConfig load_config(const CommonArgs& args) {
    geu::ExperimentConfig cfg = geu::parse_config_file(args.config_path);
    if (args.seed) cfg.seed = *args.seed;
    if (args.threads) {
        if (*args.threads < 1) throw geu::ConfigError("--threads must be >= 1");
        cfg.threads = *args.threads;
    }
    return cfg;
}

void print_summary(const geu::ExperimentReport& report) {
    for (const auto& cell : report.cells) {
        std::printf("%-12s %s=%-8g mean=%.4f var=%.6f%s\n", cell.method.c_str(),
                    report.axis_name.c_str(), cell.axis, cell.mean, cell.variance,
                    cell.failed ? "  [FAILED]" : "");
    }
}

geu::Method fit_base_method(const std::string& name, bool& geu_variant,
                            bool& supervised) {
    const geu::MethodSpec spec = geu::parse_method(name);
    geu_variant = spec.uncertainty != geu::MethodSpec::Uncertainty::None;
    supervised = spec.uncertainty == geu::MethodSpec::Uncertainty::Supervised;
    return spec.base;
}

int run_fit(const geu::ExperimentConfig& cfg, const std::string& out_dir) {
    geu::Dataset data = geu::load_experiment_dataset(cfg);
    geu::ZScoreStats stats;
    if (cfg.standardize) {
        stats = geu::zscore_fit(data);
        data = geu::zscore_apply(data, stats);
    }

    bool geu_variant = false, supervised = false;
    const geu::Method base = fit_base_method(cfg.fit_method, geu_variant, supervised);

    std::optional<geu::UncertaintyModel> u;
    if (geu_variant) {
        const geu::Matrix nn = geu::nearest_neighbor_sq_diffs(data, supervised);
        const double floor =
            cfg.floor == "auto"
                ? geu::auto_floor(geu::Matrix(cfg.fit_sigma * nn.array()))
                : std::stod(cfg.floor);
        u = geu::scale_uncertainty(nn, cfg.fit_sigma, floor);
    }
    geu::FitParams params;
    params.k1 = cfg.k1;
    params.k2 = cfg.k2;
    geu::EmbeddingModel model = geu::fit(data, base, u, cfg.fit_d, params);

    if (cfg.standardize) {
        // Fold the standardization into the saved affine map so the model
        // applies to raw feature CSVs.
        for (int j = 0; j < model.input_dim(); ++j) {
            if (stats.stddev[j] <= 1e-12 * (std::abs(stats.mean[j]) + 1.0)) continue;
            model.projection.row(j) /= stats.stddev[j];
            model.train_mean[j] = stats.mean[j] + model.train_mean[j] * stats.stddev[j];
        }
    }

    std::filesystem::create_directories(out_dir);
    const std::string path = out_dir + "/model.txt";
    geu::save_model(model, path);
    std::printf("wrote %s (%s, d=%d, %d usable directions)\n", path.c_str(),
                model.method_tag.c_str(), model.d, model.positive_directions);
    return 0;
}

int run_project(const geu::ExperimentConfig& cfg, const std::string& model_path,
                const std::string& out_dir) {
    if (model_path.empty()) {
        throw geu::ConfigError("project needs --model or the model_path config key");
    }
    const geu::EmbeddingModel model = geu::load_model(model_path);
    const geu::Dataset data = geu::load_experiment_dataset(cfg);
    const geu::Matrix projected = geu::project(model, data);

    std::filesystem::create_directories(out_dir);
    const std::string path = out_dir + "/projected.csv";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw geu::DataError("cannot write " + path);
    for (int k = 0; k < model.d; ++k) out << "y_" << k << ",";
    out << "label\n";
    char buf[64];
    for (int i = 0; i < data.n(); ++i) {
        for (int k = 0; k < model.d; ++k) {
            std::snprintf(buf, sizeof(buf), "%.17g", projected(i, k));
            out << buf << ",";
        }
        out << data.class_names[static_cast<size_t>(data.labels[static_cast<size_t>(i)])]
            << "\n";
    }
    std::printf("wrote %s (%d rows, d=%d)\n", path.c_str(), data.n(), model.d);
    return 0;
}

int run_estimate(const geu::ExperimentConfig& cfg, const std::string& out_dir) {
    geu::Dataset data = geu::load_experiment_dataset(cfg);
    if (cfg.standardize) data = geu::zscore_apply(data, geu::zscore_fit(data));
    const geu::Matrix nn = geu::nearest_neighbor_sq_diffs(
        data, cfg.uncertainty_estimator == "supervised");
    const double floor =
        cfg.floor == "auto"
            ? geu::auto_floor(geu::Matrix(cfg.uncertainty_sigma * nn.array()))
            : std::stod(cfg.floor);
    const geu::UncertaintyModel u =
        geu::scale_uncertainty(nn, cfg.uncertainty_sigma, floor);

    std::filesystem::create_directories(out_dir);
    const std::string path = out_dir + "/uncertainty.csv";
    geu::save_uncertainty_csv(u, path);
    std::printf("wrote %s (%d samples, sigma=%g, floor=%g)\n", path.c_str(), data.n(),
                u.sigma_scale, u.floor);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Graph-embedding subspace learning with data uncertainty"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string model_path;

    CLI::App* compare = app.add_subcommand(
        "compare", "cross-validated method comparison over noise levels");
    add_common(compare, args);
    CLI::App* size_curve =
        app.add_subcommand("size-curve", "accuracy as a function of training size");
    add_common(size_curve, args);
    CLI::App* boundary =
        app.add_subcommand("boundary", "2-D decision grid export per method");
    add_common(boundary, args);
    CLI::App* estimate = app.add_subcommand("estimate-uncertainty",
                                            "dump an uncertainty model CSV");
    add_common(estimate, args);
    CLI::App* fit_cmd = app.add_subcommand("fit", "fit one embedding model");
    add_common(fit_cmd, args);
    CLI::App* project_cmd =
        app.add_subcommand("project", "apply a saved model to a CSV");
    add_common(project_cmd, args);
    project_cmd->add_option("--model", model_path, "saved model file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        const geu::ExperimentConfig cfg = load_config(args);
        if (compare->parsed()) {
            const geu::ExperimentReport report = geu::run_compare(cfg);
            report.write(args.out_dir);
            print_summary(report);
            std::printf("kernel backend: %s\n", geu::kernels::active_backend());
        } else if (size_curve->parsed()) {
            const geu::ExperimentReport report = geu::run_size_curve(cfg);
            report.write(args.out_dir);
            print_summary(report);
        } else if (boundary->parsed()) {
            geu::run_boundary(cfg, args.out_dir);
            std::printf("wrote decision grids to %s\n", args.out_dir.c_str());
        } else if (estimate->parsed()) {
            return run_estimate(cfg, args.out_dir);
        } else if (fit_cmd->parsed()) {
            return run_fit(cfg, args.out_dir);
        } else if (project_cmd->parsed()) {
            return run_project(cfg, model_path.empty() ? cfg.model_path : model_path,
                               args.out_dir);
        }
        return 0;
    } catch (const geu::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const geu::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const geu::Error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
