#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "geu/data.hpp"
#include "geu/errors.hpp"

using geu::Dataset;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    const std::string path = (std::filesystem::temp_directory_path() / name).string();
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path;
}

}  // namespace

TEST_CASE("load_csv basic") {
    const auto path = write_temp("geu_basic.csv",
                                 "f1,f2,label\n1.0,2.0,a\n3.0,4.0,b\n5.5,6.5,a\n");
    const Dataset ds = geu::load_csv(path);
    CHECK(ds.n() == 3);
    CHECK(ds.dim() == 2);
    CHECK(ds.num_classes() == 2);
    CHECK(ds.labels == geu::Labels{0, 1, 0});
    CHECK(ds.features(2, 1) == doctest::Approx(6.5));
    CHECK(ds.class_names[0] == "a");
}

TEST_CASE("load_csv wdbc") {
    geu::LoadOptions opts;
    opts.label_column = "diagnosis";
    opts.drop_columns = {"id"};
    const Dataset ds = geu::load_csv(std::string(GEU_TEST_DATA_DIR) + "/wdbc.csv", opts);
    CHECK(ds.n() == 569);
    CHECK(ds.dim() == 30);
    CHECK(ds.num_classes() == 2);
    const auto counts = ds.class_counts();
    CHECK(counts[0] + counts[1] == 569);
    CHECK(std::set<std::string>(ds.class_names.begin(), ds.class_names.end()) ==
          std::set<std::string>{"B", "M"});
}

TEST_CASE("load_csv error paths") {
    const auto bad = write_temp("geu_bad.csv", "f1,f2,label\n1.0,2.0,a\n3.0,oops,b\n");
    CHECK_THROWS_AS(geu::load_csv(bad), geu::NonNumericFeature);
    try {
        geu::load_csv(bad);
    } catch (const geu::NonNumericFeature& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
        CHECK(std::string(e.what()).find("f2") != std::string::npos);
    }

    const auto missing = write_temp("geu_missing.csv", "f1,f2,label\n1.0,,a\n3.0,4.0,b\n");
    CHECK_THROWS_AS(geu::load_csv(missing), geu::ParseError);

    const auto nolabel = write_temp("geu_nolabel.csv", "f1,f2\n1.0,2.0\n3.0,4.0\n");
    CHECK_THROWS_AS(geu::load_csv(nolabel), geu::MissingLabelColumn);

    const auto short_file = write_temp("geu_short.csv", "f1,label\n1.0,a\n");
    CHECK_THROWS_AS(geu::load_csv(short_file), geu::ParseError);
}

TEST_CASE("load_csv label column by index and quoted cells") {
    const auto path = write_temp("geu_quoted.csv",
                                 "\"x\",\"the, label\"\n1.5,\"a,1\"\n2.5,\"b\"\"q\"\n");
    geu::LoadOptions opts;
    opts.label_column = "1";
    const Dataset ds = geu::load_csv(path, opts);
    CHECK(ds.n() == 2);
    CHECK(ds.dim() == 1);
    CHECK(ds.class_names[0] == "a,1");
    CHECK(ds.class_names[1] == "b\"q");
}

TEST_CASE("save/load round trip is exact") {
    Dataset ds;
    ds.features.resize(4, 3);
    ds.features << 0.1, -2.75, 3e-13, 1.0 / 3.0, 5.5, -0.0, 7.25, 1e100, -1e-7, 2, 3, 4;
    ds.labels = {1, 0, 1, 2};
    ds.class_names = {"alpha", "beta", "gamma"};
    ds.feature_names = {"a", "b", "c"};
    const auto path = write_temp("geu_roundtrip.csv", "");
    geu::save_csv(ds, path);
    const Dataset back = geu::load_csv(path);
    REQUIRE(back.n() == 4);
    REQUIRE(back.dim() == 3);
    CHECK(back.features == ds.features);  // bitwise
    CHECK(back.labels == ds.labels);
    CHECK(back.class_names == ds.class_names);
}

TEST_CASE("zscore fit/apply") {
    Dataset train;
    train.features.resize(4, 2);
    train.features << 1, 7, 2, 7, 3, 7, 4, 7;
    train.labels = {0, 0, 1, 1};
    train.class_names = {"0", "1"};

    const auto stats = geu::zscore_fit(train);
    const Dataset z = geu::zscore_apply(train, stats);
    CHECK(z.features.col(0).mean() == doctest::Approx(0.0).epsilon(1e-12));
    const double var = (z.features.col(0).array() - z.features.col(0).mean()).square().mean();
    CHECK(std::sqrt(var) == doctest::Approx(1.0).epsilon(1e-12));
    // constant feature passes through unchanged
    for (int i = 0; i < 4; ++i) CHECK(z.features(i, 1) == 7.0);
}

TEST_CASE("zscore uses train statistics on other splits") {
    Dataset train, test;
    train.features.resize(3, 1);
    train.features << 0, 1, 2;
    train.labels = {0, 0, 1};
    test.features.resize(3, 1);
    test.features << 10, 11, 12;
    test.labels = {0, 0, 1};

    const auto stats = geu::zscore_fit(train);
    const Dataset tz = geu::zscore_apply(test, stats);
    const auto own = geu::zscore_fit(test);
    const Dataset tz_own = geu::zscore_apply(test, own);
    // transformed with train stats differs from the test set's own z-score
    CHECK(tz.features(0, 0) != tz_own.features(0, 0));
    CHECK(tz.features.col(0).mean() > 5.0);  // train stats leave the offset visible
}

TEST_CASE("add_noise") {
    Dataset ds;
    ds.features.resize(5, 2);
    ds.features << 1, 2, 3, 4, 5, 6, 7, 8, 9, 10;
    ds.labels = {0, 0, 0, 1, 1};

    SUBCASE("level zero is bit-identical") {
        const Dataset out = geu::add_noise(ds, 0.0, 99);
        CHECK(out.features == ds.features);
    }
    SUBCASE("same seed same output, labels and shape preserved") {
        const Dataset a = geu::add_noise(ds, 0.3, 123);
        const Dataset b = geu::add_noise(ds, 0.3, 123);
        const Dataset c = geu::add_noise(ds, 0.3, 124);
        CHECK(a.features == b.features);
        CHECK(a.features != c.features);
        CHECK(a.labels == ds.labels);
        CHECK(a.features.rows() == ds.features.rows());
    }
    SUBCASE("empirical noise std tracks level * feature std") {
        Dataset big;
        const int n = 100000;
        big.features = geu::Matrix::Zero(n, 1);
        for (int i = 0; i < n; ++i) big.features(i, 0) = (i % 2) ? 1.0 : -1.0;  // std 1
        big.labels.assign(n, 0);
        const Dataset noisy = geu::add_noise(big, 0.1, 7);
        const geu::Matrix diff = noisy.features - big.features;
        const double sd = std::sqrt(diff.array().square().mean());
        CHECK(sd > 0.098);
        CHECK(sd < 0.102);
    }
}

TEST_CASE("kfold") {
    Dataset ds;
    ds.features.resize(10, 1);
    for (int i = 0; i < 10; ++i) ds.features(i, 0) = i;
    ds.labels = {0, 0, 0, 0, 0, 0, 0, 0, 1, 1};
    ds.class_names = {"0", "1"};

    SUBCASE("equal fold sizes") {
        const auto split = geu::kfold(ds, 5, 42, false);
        std::vector<int> sizes(5, 0);
        for (int f : split.fold_assignments) sizes[static_cast<size_t>(f)]++;
        for (int s : sizes) CHECK(s == 2);
    }
    SUBCASE("stratified keeps one B per fold") {
        const auto split = geu::kfold(ds, 2, 42, true);
        std::vector<int> b_count(2, 0);
        for (int i = 8; i < 10; ++i) b_count[static_cast<size_t>(split.fold_assignments[static_cast<size_t>(i)])]++;
        CHECK(b_count[0] == 1);
        CHECK(b_count[1] == 1);
    }
    SUBCASE("seed determinism") {
        const auto a = geu::kfold(ds, 5, 7, true);
        const auto b = geu::kfold(ds, 5, 7, true);
        CHECK(a.fold_assignments == b.fold_assignments);
    }
    SUBCASE("fold sizes differ by at most one, stratified or not") {
        for (bool strat : {false, true}) {
            for (int k = 2; k <= 5; ++k) {
                if (strat && k > 2) continue;  // class B only has 2 members
                const auto split = geu::kfold(ds, k, 5, strat);
                std::vector<int> sizes(static_cast<size_t>(k), 0);
                for (int f : split.fold_assignments) sizes[static_cast<size_t>(f)]++;
                const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
                CHECK(*hi - *lo <= 1);
            }
        }
    }
    SUBCASE("class too small for stratified") {
        CHECK_THROWS_AS(geu::kfold(ds, 3, 1, true), geu::ClassTooSmall);
    }
}

TEST_CASE("synthetic blobs") {
    const Dataset a = geu::synthetic_two_class(200, 10.0, 0.1, 5);
    const Dataset b = geu::synthetic_two_class(200, 10.0, 0.1, 5);
    CHECK(a.features == b.features);
    CHECK(a.n() == 400);
    CHECK(a.dim() == 2);

    // empirical means within 5*spread/sqrt(n) of the true centers
    geu::Vector m0 = geu::Vector::Zero(2), m1 = geu::Vector::Zero(2);
    for (int i = 0; i < 200; ++i) m0 += a.features.row(i).transpose();
    for (int i = 200; i < 400; ++i) m1 += a.features.row(i).transpose();
    m0 /= 200;
    m1 /= 200;
    const double tol = 5.0 * 0.1 / std::sqrt(200.0);
    CHECK(std::abs(m0[0] + 5.0) < tol);
    CHECK(std::abs(m0[1]) < tol);
    CHECK(std::abs(m1[0] - 5.0) < tol);
    CHECK(std::abs(m1[1]) < tol);
}

TEST_CASE("stratified subsample") {
    Dataset ds;
    ds.features.resize(12, 1);
    for (int i = 0; i < 12; ++i) ds.features(i, 0) = i;
    ds.labels = {0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1};
    ds.class_names = {"0", "1"};

    const auto idx = geu::stratified_subsample(ds, 6, 3);
    CHECK(idx.size() == 6);
    int ones = 0;
    for (int i : idx) ones += ds.labels[static_cast<size_t>(i)];
    CHECK(ones == 2);  // proportional 1/3 share

    CHECK_THROWS_AS(geu::stratified_subsample(ds, 13, 3), geu::SizeTooLarge);
    CHECK_THROWS_AS(geu::stratified_subsample(ds, 1, 3), geu::SizeTooLarge);
    const auto one_each = geu::stratified_subsample(ds, 2, 3);
    CHECK(one_each.size() == 2);
}
