#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "geu/types.hpp"

namespace geu {

// N x D feature matrix with contiguous 0..C-1 class ids. Class ids are
// assigned at load time by sorting the distinct label strings (numerically
// when every label parses as an integer), so a save/load round trip
// preserves the mapping.
struct Dataset {
    Matrix features;
    Labels labels;
    std::vector<std::string> feature_names;  // empty when the source had none
    std::vector<std::string> class_names;    // id -> original label string

    int n() const { return static_cast<int>(features.rows()); }
    int dim() const { return static_cast<int>(features.cols()); }
    int num_classes() const { return static_cast<int>(class_names.size()); }
    std::vector<int> class_counts() const;

    Dataset subset(const std::vector<int>& row_indices) const;
};

struct LoadOptions {
    std::string label_column = "label";      // header name or 0-based index
    char delimiter = ',';
    bool has_header = true;
    std::vector<std::string> drop_columns;   // header names or 0-based indices
};

Dataset load_csv(const std::string& path, const LoadOptions& opts = {});
void save_csv(const Dataset& ds, const std::string& path, char delimiter = ',');

struct ZScoreStats {
    Vector mean;
    Vector stddev;  // zero-variance features carry divisor 1
};

ZScoreStats zscore_fit(const Dataset& train);
Dataset zscore_apply(const Dataset& d, const ZScoreStats& stats);

// Additive Gaussian noise with per-feature std = level * s_j, where s_j is
// the feature's std over x. level = 0 returns an identical copy.
Dataset add_noise(const Dataset& x, double level, std::uint64_t seed);

struct FoldSplit {
    std::vector<int> fold_assignments;  // values in 0..k-1
    std::uint64_t seed = 0;

    std::vector<int> fold_indices(int fold) const;
    std::vector<int> complement_indices(int fold) const;
    int num_folds() const;
};

FoldSplit kfold(const Dataset& x, int k, std::uint64_t seed, bool stratified);

// Two isotropic 2-D Gaussian blobs with means (+-separation/2, 0).
Dataset synthetic_two_class(int n_per_class, double separation, double spread,
                            std::uint64_t seed);

// Stratified subsample of `size` rows, at least one per class.
std::vector<int> stratified_subsample(const Dataset& x, int size,
                                      std::uint64_t seed);

}  // namespace geu
