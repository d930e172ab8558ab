#include <doctest.h>

#include <filesystem>
#include <random>

#include "geu/errors.hpp"
#include "geu/uncertainty.hpp"

using geu::Dataset;
using geu::Matrix;

namespace {

Dataset three_points() {
    Dataset ds;
    ds.features.resize(3, 2);
    ds.features << 0, 0, 1, 2, 4, 4;
    ds.labels = {0, 1, 0};
    ds.class_names = {"A", "B"};
    return ds;
}

}  // namespace

TEST_CASE("unsupervised estimator, hand-computed") {
    // nearest to (0,0) is (1,2): dist 5 < 32
    const auto u = geu::estimate_unsupervised(three_points(), 1.0, 0.0);
    CHECK(u.diag_covs(0, 0) == doctest::Approx(1.0));
    CHECK(u.diag_covs(0, 1) == doctest::Approx(4.0));
    // nearest to (1,2) is (0,0): dist 5 < 13
    CHECK(u.diag_covs(1, 0) == doctest::Approx(1.0));
    CHECK(u.diag_covs(1, 1) == doctest::Approx(4.0));
}

TEST_CASE("supervised estimator restricts to the same class") {
    const auto u = geu::estimate_supervised(three_points(), 1.0, 0.0);
    // sample 0's only same-class neighbor is (4,4)
    CHECK(u.diag_covs(0, 0) == doctest::Approx(16.0));
    CHECK(u.diag_covs(0, 1) == doctest::Approx(16.0));
    // sample 1 is a singleton class: falls back to the unsupervised set
    CHECK(u.diag_covs(1, 0) == doctest::Approx(1.0));
    CHECK(u.diag_covs(1, 1) == doctest::Approx(4.0));
}

TEST_CASE("sigma zero gives the all-zero model") {
    const auto u = geu::estimate_unsupervised(three_points(), 0.0, 0.0);
    CHECK(u.all_zero());
}

TEST_CASE("floor dominates duplicated samples") {
    Dataset ds;
    ds.features.resize(3, 2);
    ds.features << 1, 1, 1, 1, 5, 5;
    ds.labels = {0, 0, 1};
    ds.class_names = {"A", "B"};
    const auto u = geu::estimate_unsupervised(ds, 1.0, 1e-6);
    CHECK(u.diag_covs(0, 0) == 1e-6);
    CHECK(u.diag_covs(0, 1) == 1e-6);
    CHECK(u.diag_covs(1, 0) == 1e-6);
}

TEST_CASE("single-class dataset: supervised equals unsupervised") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    Dataset ds;
    ds.features.resize(8, 3);
    for (int i = 0; i < 8; ++i) {
        for (int j = 0; j < 3; ++j) ds.features(i, j) = d(rng);
        ds.labels.push_back(0);
    }
    ds.class_names = {"only"};
    const auto a = geu::estimate_supervised(ds, 0.7, 0.0);
    const auto b = geu::estimate_unsupervised(ds, 0.7, 0.0);
    CHECK(a.diag_covs == b.diag_covs);
}

TEST_CASE("estimator properties") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    Dataset ds;
    ds.features.resize(15, 4);
    for (int i = 0; i < 15; ++i) {
        for (int j = 0; j < 4; ++j) ds.features(i, j) = d(rng);
        ds.labels.push_back(i % 3);
    }
    ds.class_names = {"0", "1", "2"};

    SUBCASE("sigma scaling is exactly linear with zero floor") {
        const auto u1 = geu::estimate_supervised(ds, 0.4, 0.0);
        const auto u2 = geu::estimate_supervised(ds, 0.8, 0.0);
        CHECK((u2.diag_covs - 2.0 * u1.diag_covs).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("translation invariance") {
        Dataset shifted = ds;
        shifted.features.rowwise() += Eigen::RowVector4d(3.5, -1.25, 0.5, 100.0);
        const auto a = geu::estimate_unsupervised(ds, 1.0, 0.0);
        const auto b = geu::estimate_unsupervised(shifted, 1.0, 0.0);
        CHECK((a.diag_covs - b.diag_covs).cwiseAbs().maxCoeff() <= 1e-9);
        const auto as = geu::estimate_supervised(ds, 1.0, 0.0);
        const auto bs = geu::estimate_supervised(shifted, 1.0, 0.0);
        CHECK((as.diag_covs - bs.diag_covs).cwiseAbs().maxCoeff() <= 1e-9);
    }
    SUBCASE("supervised rows dominate unsupervised rows entrywise") {
        // no singleton classes here, so no fallback triggers; the same-class
        // nearest neighbor is at least as far as the global one
        const auto sup = geu::estimate_supervised(ds, 1.0, 0.0);
        const auto uns = geu::estimate_unsupervised(ds, 1.0, 0.0);
        CHECK(sup.diag_covs.rowwise().sum().minCoeff() >= 0.0);
        for (int i = 0; i < 15; ++i) {
            CHECK(sup.diag_covs.row(i).sum() >= uns.diag_covs.row(i).sum() - 1e-15);
        }
    }
}

TEST_CASE("explicit models") {
    CHECK(geu::from_explicit(Matrix::Zero(3, 2)).all_zero());

    Matrix ones = Matrix::Ones(4, 2);
    const auto u = geu::from_explicit(ones);
    CHECK(u.sigma_scale == 1.0);
    CHECK(u.floor == 0.0);

    Matrix bad = Matrix::Ones(2, 2);
    bad(1, 0) = -0.5;
    CHECK_THROWS_AS(geu::from_explicit(bad), geu::NegativeVariance);
}

TEST_CASE("csv round trip") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> d(0.0, 3.0);
    Matrix covs(5, 3);
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 3; ++j) covs(i, j) = d(rng);
    }
    const auto u = geu::from_explicit(covs);
    const auto path =
        (std::filesystem::temp_directory_path() / "geu_unc.csv").string();
    geu::save_uncertainty_csv(u, path);
    const auto back = geu::load_uncertainty_csv(path);
    CHECK(back.diag_covs == covs);
}

TEST_CASE("auto floor") {
    Matrix raw(2, 2);
    raw << 0.0, 4.0, 2.0, 0.0;
    CHECK(geu::auto_floor(raw) == doctest::Approx(1e-8 * 4.0));  // upper median of {2,4}
    CHECK(geu::auto_floor(Matrix::Zero(3, 3)) == 0.0);
}

TEST_CASE("too few samples") {
    Dataset ds;
    ds.features.resize(1, 2);
    ds.features << 0, 0;
    ds.labels = {0};
    ds.class_names = {"A"};
    CHECK_THROWS_AS(geu::estimate_unsupervised(ds, 1.0, 0.0), geu::TooFewSamples);
}
