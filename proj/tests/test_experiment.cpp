#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "geu/errors.hpp"
#include "geu/experiment.hpp"
#include "geu/grid.hpp"
#include "geu/seeding.hpp"

using geu::Dataset;
using geu::ExperimentConfig;
using geu::ExperimentReport;

namespace {

Dataset blobs(int n_per_class, double sep, double spread, std::uint64_t seed) {
    return geu::synthetic_two_class(n_per_class, sep, spread, seed);
}

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.methods = {"LDA", "GEU-LDA-S"};
    cfg.sigma_grid = {0.1, 1.0};
    cfg.d_grid = {1, 2};
    cfg.k_grid = {1, 3};
    cfg.noise_levels = {0.0, 0.2};
    cfg.folds = 3;
    cfg.inner_folds = 2;
    cfg.repeats = 2;
    cfg.seed = 77;
    cfg.k1 = 3;
    cfg.k2 = 5;
    return cfg;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("config parsing") {
    SUBCASE("defaults plus overrides") {
        const auto cfg = geu::parse_config_string(
            "# comment\n"
            "dataset = data.csv\n"
            "methods = MFA, GEU-MFA-S\n"
            "sigma_grid = 0.5, 1\n"
            "folds=4\n"
            "seed = 9\n",
            "test");
        CHECK(cfg.dataset == "data.csv");
        CHECK(cfg.methods == std::vector<std::string>{"MFA", "GEU-MFA-S"});
        CHECK(cfg.sigma_grid == std::vector<double>{0.5, 1.0});
        CHECK(cfg.folds == 4);
        CHECK(cfg.seed == 9);
        CHECK(cfg.repeats == 10);         // default
        CHECK(cfg.d_grid.size() == 4);    // default {1,2,4,8}
        CHECK(cfg.k1 == 5);               // default
    }
    SUBCASE("unknown keys are hard errors") {
        CHECK_THROWS_AS(geu::parse_config_string("sigmagrid = 1\n", "test"),
                        geu::ConfigError);
    }
    SUBCASE("malformed values") {
        CHECK_THROWS_AS(geu::parse_config_string("folds = many\n", "test"),
                        geu::ConfigError);
        CHECK_THROWS_AS(geu::parse_config_string("methods = LDA, NOPE\n", "test"),
                        geu::ConfigError);
        CHECK_THROWS_AS(geu::parse_config_string("d_grid =\n", "test"), geu::ConfigError);
    }
}

TEST_CASE("method parsing") {
    const auto m = geu::parse_method("GEU-MFA-U");
    CHECK(m.base == geu::Method::Mfa);
    CHECK(m.uncertainty == geu::MethodSpec::Uncertainty::Unsupervised);
    CHECK_FALSE(m.rlda);
    CHECK(geu::parse_method("RLDA").rlda);
    CHECK_THROWS_AS(geu::parse_method("PCA"), geu::ConfigError);
}

TEST_CASE("compare run on separable blobs") {
    const Dataset data = blobs(30, 12.0, 0.5, 5);
    ExperimentConfig cfg = small_config();
    cfg.d_grid = {1};

    const ExperimentReport report = geu::run_compare(cfg, data);
    REQUIRE(report.cells.size() == 4);  // 2 methods x 2 noise levels

    for (const auto& cell : report.cells) {
        CHECK_FALSE(cell.failed);
        CHECK(cell.raw.size() == 6);  // repeats x folds
        if (cell.axis == 0.0) CHECK(cell.mean > 0.95);  // trivially separable
    }

    SUBCASE("determinism across runs and thread counts") {
        ExperimentConfig threaded = cfg;
        threaded.threads = 2;
        const ExperimentReport again = geu::run_compare(cfg, data);
        const ExperimentReport parallel = geu::run_compare(threaded, data);
        REQUIRE(again.cells.size() == report.cells.size());
        for (size_t i = 0; i < report.cells.size(); ++i) {
            CHECK(report.cells[i].mean == again.cells[i].mean);
            CHECK(report.cells[i].mean == parallel.cells[i].mean);
            REQUIRE(report.cells[i].raw.size() == parallel.cells[i].raw.size());
            for (size_t j = 0; j < report.cells[i].raw.size(); ++j) {
                CHECK(report.cells[i].raw[j].accuracy ==
                      parallel.cells[i].raw[j].accuracy);
                CHECK(report.cells[i].raw[j].sigma == parallel.cells[i].raw[j].sigma);
                CHECK(report.cells[i].raw[j].d == parallel.cells[i].raw[j].d);
                CHECK(report.cells[i].raw[j].k == parallel.cells[i].raw[j].k);
            }
        }
    }

    SUBCASE("report files are deterministic and self-consistent") {
        const auto dir1 =
            (std::filesystem::temp_directory_path() / "geu_rep1").string();
        const auto dir2 =
            (std::filesystem::temp_directory_path() / "geu_rep2").string();
        report.write(dir1);
        const ExperimentReport again = geu::run_compare(cfg, data);
        again.write(dir2);
        for (const char* name : {"report.csv", "report_raw.csv", "report.md"}) {
            CHECK(slurp(dir1 + "/" + name) == slurp(dir2 + "/" + name));
        }
        CHECK(slurp(dir1 + "/report_raw.csv").find("accuracy") != std::string::npos);
    }
}

TEST_CASE("fold splits are shared across methods within a repeat") {
    // identical selection seeds imply identical folds; verified through the
    // fold hash of the split the runner derives from (seed, repeat)
    const Dataset data = blobs(20, 4.0, 1.0, 9);
    const auto s1 = geu::kfold(data, 4, geu::mix_seed({123, 1, 0}), true);
    const auto s2 = geu::kfold(data, 4, geu::mix_seed({123, 1, 0}), true);
    CHECK(s1.fold_assignments == s2.fold_assignments);
    const auto s3 = geu::kfold(data, 4, geu::mix_seed({123, 1, 1}), true);
    CHECK(s1.fold_assignments != s3.fold_assignments);
}

TEST_CASE("report mean/variance consistency is asserted on write") {
    geu::ReportCell cell;
    cell.method = "LDA";
    cell.axis = 0.0;
    cell.raw = {{0, 0, 0.5, 0, 1, 1, 0}, {0, 1, 0.7, 0, 1, 1, 0},
                {1, 0, 0.6, 0, 1, 1, 0}, {1, 1, 0.8, 0, 1, 1, 0}};
    cell.finalize();
    CHECK(cell.mean == doctest::Approx(0.65));
    CHECK(cell.variance == doctest::Approx(0.01));

    ExperimentReport report;
    report.cells.push_back(cell);
    report.cells[0].mean = 0.9;  // corrupt
    const auto dir = (std::filesystem::temp_directory_path() / "geu_badrep").string();
    CHECK_THROWS_AS(report.write(dir), geu::NumericalError);
}

TEST_CASE("size curve at the full pool matches compare at noise zero") {
    const Dataset data = blobs(25, 6.0, 1.0, 13);
    ExperimentConfig cfg = small_config();
    cfg.methods = {"LDA"};
    cfg.noise_levels = {0.0};
    cfg.d_grid = {1};
    cfg.repeats = 3;

    const ExperimentReport cmp = geu::run_compare(cfg, data);

    ExperimentConfig sz = cfg;
    // pool = all but fold 0 of a 3-fold split over 50 samples
    sz.train_sizes = {33};
    const ExperimentReport curve = geu::run_size_curve(sz, data);
    REQUIRE(curve.cells.size() == 1);
    CHECK_FALSE(curve.cells[0].failed);
    CHECK(std::abs(curve.cells[0].mean - cmp.cells[0].mean) < 0.08);

    SUBCASE("oversized request fails") {
        ExperimentConfig bad = sz;
        bad.train_sizes = {49};
        const ExperimentReport r = geu::run_size_curve(bad, data);
        CHECK(r.cells[0].failed);
        CHECK(r.cells[0].error.find("exceeds") != std::string::npos);
    }
}

TEST_CASE("boundary grids") {
    ExperimentConfig cfg;
    cfg.dataset = "synthetic";
    cfg.boundary_points = 25;
    cfg.boundary_separation = 12.0;  // well separated
    cfg.boundary_spread = 0.5;
    cfg.boundary_resolution = 40;
    cfg.boundary_m = {0, 100};
    cfg.k1 = 3;
    cfg.k2 = 5;
    cfg.seed = 21;

    const auto dir = (std::filesystem::temp_directory_path() / "geu_boundary").string();
    geu::run_boundary(cfg, dir);

    auto load_grid = [&](const std::string& name) {
        const std::string text = slurp(dir + "/grid_" + name + ".csv");
        geu::Labels labels;
        std::stringstream ss(text);
        std::string line;
        std::getline(ss, line);  // header
        while (std::getline(ss, line)) {
            const auto pos = line.rfind(',');
            labels.push_back(std::stoi(line.substr(pos + 1)));
        }
        return labels;
    };

    const auto mfa = load_grid("MFA");
    const auto geu_mfa = load_grid("GEU-MFA");
    const auto mfa0 = load_grid("MFA-0");
    const auto mfa100 = load_grid("MFA-100");
    REQUIRE(mfa.size() == 1600);
    REQUIRE(geu_mfa.size() == 1600);

    // M = 0 augmentation is exactly plain MFA
    CHECK(mfa0 == mfa);

    // well-separated blobs: all grids nearly identical (< 2% disagreement)
    auto disagreement = [](const geu::Labels& a, const geu::Labels& b) {
        size_t diff = 0;
        for (size_t i = 0; i < a.size(); ++i) diff += a[i] != b[i];
        return static_cast<double>(diff) / static_cast<double>(a.size());
    };
    CHECK(disagreement(mfa, geu_mfa) < 0.02);
    CHECK(disagreement(mfa, mfa100) < 0.02);

    // grids partition into contiguous label regions: each grid row flips
    // labels at most twice for these blobs
    const int res = 40;
    for (int iy = 0; iy < res; ++iy) {
        int flips = 0;
        for (int ix = 1; ix < res; ++ix) {
            flips += mfa[static_cast<size_t>(iy * res + ix)] !=
                     mfa[static_cast<size_t>(iy * res + ix - 1)];
        }
        CHECK(flips <= 2);
    }
}

TEST_CASE("augmented boundary trends toward the GEU grid over seeds") {
    // Figure-1-style claim: more augmentation moves MFA toward GEU-MFA.
    int wins = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Dataset train = blobs(20, 2.0, 1.0, 1000 + seed);
        geu::FitParams params;
        params.k1 = 3;
        params.k2 = 5;
        const geu::Matrix base = geu::nearest_neighbor_sq_diffs(train, true);
        const auto u = geu::scale_uncertainty(base, 1.0, 0.0);

        geu::GridBounds bounds{-3, 3, -3, 3};
        auto grid_for = [&](const Dataset& tr, const std::optional<geu::UncertaintyModel>& unc) {
            const auto model = geu::fit(tr, geu::Method::Mfa, unc, 1, params);
            const geu::KnnModel knn{geu::project(model, tr), tr.labels, 1};
            return geu::decision_grid(model, knn, bounds, 30);
        };
        const auto geu_grid = grid_for(train, u);
        const auto m100 = grid_for(geu::augment_dataset(train, u, 100, seed * 7 + 1),
                                   std::nullopt);
        const auto m1000 = grid_for(geu::augment_dataset(train, u, 1000, seed * 7 + 2),
                                    std::nullopt);
        const double agree100 = geu::grid_agreement(m100, geu_grid);
        const double agree1000 = geu::grid_agreement(m1000, geu_grid);
        wins += agree1000 >= agree100;
    }
    CHECK(wins >= 6);  // trend over seeds, not per-seed dominance
}

TEST_CASE("grid point evaluation marks unreachable d as NaN") {
    const Dataset train = blobs(10, 3.0, 1.0, 3);
    const Dataset eval = blobs(5, 3.0, 1.0, 4);
    ExperimentConfig cfg = small_config();
    const auto scores = geu::evaluate_grid_point(train, eval, geu::parse_method("LDA"),
                                                 0.0, {1, 2}, {1}, cfg);
    CHECK_FALSE(std::isnan(scores.accuracy[0][0]));
    CHECK(scores.ridge > 0.0);
}
