#pragma once

#include <vector>

#include "geu/types.hpp"

namespace geu {

struct KnnModel {
    Matrix train_points;  // N x d
    Labels train_labels;
    int k = 1;
};

// Majority label among the k Euclidean-nearest training points. Distance
// ties break toward the smaller index; vote ties toward the label whose
// nearest member is closest, then the smaller label id.
Labels knn_predict(const KnnModel& model, const Matrix& queries);

// Predictions for several k values sharing one neighbor sort per query.
std::vector<Labels> knn_predict_many(const Matrix& train_points,
                                     const Labels& train_labels,
                                     const Matrix& queries,
                                     const std::vector<int>& ks);

double accuracy(const Labels& predicted, const Labels& truth);

}  // namespace geu
