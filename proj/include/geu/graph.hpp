#pragma once

#include "geu/data.hpp"
#include "geu/types.hpp"

namespace geu {

// Symmetric N x N weight matrix with an exactly zero diagonal; pairwise sums
// run over i != j.
struct WeightMatrix {
    Matrix w;
};

struct GraphPair {
    WeightMatrix intrinsic;
    WeightMatrix penalty;
    Vector degrees;           // D_ii = sum_{j != i} W_ij
    Vector penalty_degrees;
    Matrix laplacian;         // L = D - W
    Matrix penalty_laplacian;
};

// Degree and Laplacian matrices derived from the two weight matrices.
GraphPair make_graph_pair(WeightMatrix intrinsic, WeightMatrix penalty);

// LDA graphs: intrinsic W_ij = 1/N_{c_i} for same-class pairs (i != j);
// penalty W^p_ij = 1/N - 1/N_{c_i} for same-class pairs, 1/N otherwise.
GraphPair lda_graphs(const Labels& labels);

// MFA graphs: intrinsic connects same-class k1-nearest-neighbor pairs;
// penalty marks the k2 shortest between-class pairs of each class.
// Distances are Euclidean in the input feature space; ties break toward the
// smaller sample index.
GraphPair mfa_graphs(const Dataset& x, int k1, int k2);

// |sum_{i!=j} (y_i - y_j)^2 W_ij - 2 y^T L y|, the pairwise-sum/Laplacian
// identity exposed for testing.
double graph_sum_identity_check(const Vector& y, const WeightMatrix& g);

}  // namespace geu
