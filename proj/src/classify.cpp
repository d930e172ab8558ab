#include "geu/classify.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "geu/errors.hpp"
#include "geu/kernels.hpp"

namespace geu {

namespace {

int vote(const std::vector<std::pair<double, int>>& neighbors, const Labels& labels,
         int k) {
    // neighbors sorted by (distance, index); take the first k.
    int max_label = 0;
    for (int i = 0; i < k; ++i) max_label = std::max(max_label, labels[static_cast<size_t>(neighbors[static_cast<size_t>(i)].second)]);

    std::vector<int> counts(static_cast<size_t>(max_label) + 1, 0);
    std::vector<double> nearest(static_cast<size_t>(max_label) + 1,
                                std::numeric_limits<double>::infinity());
    for (int i = 0; i < k; ++i) {
        const int lbl = labels[static_cast<size_t>(neighbors[static_cast<size_t>(i)].second)];
        counts[static_cast<size_t>(lbl)]++;
        nearest[static_cast<size_t>(lbl)] =
            std::min(nearest[static_cast<size_t>(lbl)], neighbors[static_cast<size_t>(i)].first);
    }

    int best = -1;
    for (int lbl = 0; lbl <= max_label; ++lbl) {
        if (counts[static_cast<size_t>(lbl)] == 0) continue;
        if (best < 0 || counts[static_cast<size_t>(lbl)] > counts[static_cast<size_t>(best)] ||
            (counts[static_cast<size_t>(lbl)] == counts[static_cast<size_t>(best)] &&
             nearest[static_cast<size_t>(lbl)] < nearest[static_cast<size_t>(best)])) {
            best = lbl;
        }
        // equal count and equal nearest distance falls through to the
        // smaller label id, which we saw first
    }
    return best;
}

}  // namespace

std::vector<Labels> knn_predict_many(const Matrix& train_points,
                                     const Labels& train_labels,
                                     const Matrix& queries,
                                     const std::vector<int>& ks) {
    const Eigen::Index n = train_points.rows();
    if (n < 1 || train_labels.size() != static_cast<size_t>(n)) {
        throw EmptyModel("knn: empty or inconsistent training set");
    }
    if (queries.cols() != train_points.cols()) {
        throw DimensionMismatch("knn: query dimension " + std::to_string(queries.cols()) +
                                " != train dimension " + std::to_string(train_points.cols()));
    }
    int k_max = 0;
    for (int k : ks) {
        if (k < 1 || k > n) {
            throw EmptyModel("knn: k = " + std::to_string(k) + " outside [1, " +
                             std::to_string(n) + "]");
        }
        k_max = std::max(k_max, k);
    }

    const auto dim = static_cast<std::size_t>(train_points.cols());
    std::vector<Labels> out(ks.size(), Labels(static_cast<size_t>(queries.rows())));
    std::vector<std::pair<double, int>> neigh(static_cast<size_t>(n));
    for (Eigen::Index q = 0; q < queries.rows(); ++q) {
        for (Eigen::Index i = 0; i < n; ++i) {
            neigh[static_cast<size_t>(i)] = {
                kernels::squared_distance(queries.row(q).data(),
                                          train_points.row(i).data(), dim),
                static_cast<int>(i)};
        }
        std::partial_sort(neigh.begin(), neigh.begin() + k_max, neigh.end());
        for (size_t t = 0; t < ks.size(); ++t) {
            out[t][static_cast<size_t>(q)] = vote(neigh, train_labels, ks[t]);
        }
    }
    return out;
}

Labels knn_predict(const KnnModel& model, const Matrix& queries) {
    return knn_predict_many(model.train_points, model.train_labels, queries,
                            {model.k})[0];
}

double accuracy(const Labels& predicted, const Labels& truth) {
    if (predicted.size() != truth.size()) {
        throw LengthMismatch("accuracy: " + std::to_string(predicted.size()) + " vs " +
                             std::to_string(truth.size()) + " labels");
    }
    if (predicted.empty()) throw LengthMismatch("accuracy: empty label vectors");
    int hits = 0;
    for (size_t i = 0; i < predicted.size(); ++i) {
        if (predicted[i] == truth[i]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

}  // namespace geu
