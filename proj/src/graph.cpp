#include "geu/graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <tuple>

#include "geu/errors.hpp"
#include "geu/kernels.hpp"

namespace geu {

namespace {

std::map<int, int> label_counts(const Labels& labels) {
    std::map<int, int> counts;
    for (int c : labels) counts[c]++;
    return counts;
}

Matrix pairwise_squared_distances(const Matrix& features) {
    const Eigen::Index n = features.rows();
    const auto dim = static_cast<std::size_t>(features.cols());
    Matrix d2(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        d2(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double d = kernels::squared_distance(features.row(i).data(),
                                                       features.row(j).data(), dim);
            d2(i, j) = d;
            d2(j, i) = d;
        }
    }
    return d2;
}

}  // namespace

GraphPair make_graph_pair(WeightMatrix intrinsic, WeightMatrix penalty) {
    GraphPair gp;
    gp.intrinsic = std::move(intrinsic);
    gp.penalty = std::move(penalty);
    gp.degrees = gp.intrinsic.w.rowwise().sum();
    gp.penalty_degrees = gp.penalty.w.rowwise().sum();
    gp.laplacian = -gp.intrinsic.w;
    gp.laplacian.diagonal() += gp.degrees;
    gp.penalty_laplacian = -gp.penalty.w;
    gp.penalty_laplacian.diagonal() += gp.penalty_degrees;
    return gp;
}

GraphPair lda_graphs(const Labels& labels) {
    const auto n = static_cast<Eigen::Index>(labels.size());
    if (n < 2) throw DataError("lda_graphs: need at least 2 samples");
    const auto counts = label_counts(labels);
    if (counts.size() < 2) throw SingleClass("lda_graphs: only one class present");

    const double inv_n = 1.0 / static_cast<double>(n);
    WeightMatrix w, wp;
    w.w = Matrix::Zero(n, n);
    wp.w = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const int ci = labels[static_cast<size_t>(i)];
        const double inv_nc = 1.0 / counts.at(ci);
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            if (labels[static_cast<size_t>(j)] == ci) {
                w.w(i, j) = inv_nc;
                wp.w(i, j) = inv_n - inv_nc;
            } else {
                wp.w(i, j) = inv_n;
            }
        }
    }
    return make_graph_pair(std::move(w), std::move(wp));
}

GraphPair mfa_graphs(const Dataset& x, int k1, int k2) {
    const Eigen::Index n = x.features.rows();
    if (n < 2) throw DataError("mfa_graphs: need at least 2 samples");
    if (k1 < 1 || k2 < 1) throw KTooLarge("mfa_graphs: k1 and k2 must be positive");
    const auto counts = label_counts(x.labels);
    if (counts.size() < 2) throw SingleClass("mfa_graphs: only one class present");

    int min_class = x.n();
    for (const auto& [c, cnt] : counts) min_class = std::min(min_class, cnt);
    if (k1 >= min_class) {
        throw KTooLarge("mfa_graphs: k1 = " + std::to_string(k1) +
                        " must be smaller than the smallest class (" +
                        std::to_string(min_class) + ")");
    }
    for (const auto& [c, cnt] : counts) {
        const long pairs = static_cast<long>(cnt) * (n - cnt);
        if (k2 > pairs) {
            throw KTooLarge("mfa_graphs: k2 = " + std::to_string(k2) +
                            " exceeds the " + std::to_string(pairs) +
                            " between-class pairs of class " + std::to_string(c));
        }
    }

    const Matrix d2 = pairwise_squared_distances(x.features);

    WeightMatrix w, wp;
    w.w = Matrix::Zero(n, n);
    wp.w = Matrix::Zero(n, n);

    // Intrinsic: k1 nearest same-class neighbors, symmetric OR.
    for (Eigen::Index j = 0; j < n; ++j) {
        std::vector<std::pair<double, Eigen::Index>> cand;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (i == j) continue;
            if (x.labels[static_cast<size_t>(i)] != x.labels[static_cast<size_t>(j)]) continue;
            cand.emplace_back(d2(i, j), i);
        }
        std::sort(cand.begin(), cand.end());
        const size_t take = std::min(cand.size(), static_cast<size_t>(k1));
        for (size_t t = 0; t < take; ++t) {
            w.w(cand[t].second, j) = 1.0;
            w.w(j, cand[t].second) = 1.0;
        }
    }

    // Penalty: each class's k2 shortest between-class pairs, independently.
    for (const auto& [c, cnt] : counts) {
        std::vector<std::tuple<double, Eigen::Index, Eigen::Index>> pairs;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (x.labels[static_cast<size_t>(i)] != c) continue;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (x.labels[static_cast<size_t>(j)] == c) continue;
                pairs.emplace_back(d2(i, j), std::min(i, j), std::max(i, j));
            }
        }
        std::sort(pairs.begin(), pairs.end());
        const size_t take = std::min(pairs.size(), static_cast<size_t>(k2));
        for (size_t t = 0; t < take; ++t) {
            wp.w(std::get<1>(pairs[t]), std::get<2>(pairs[t])) = 1.0;
            wp.w(std::get<2>(pairs[t]), std::get<1>(pairs[t])) = 1.0;
        }
    }
    return make_graph_pair(std::move(w), std::move(wp));
}

double graph_sum_identity_check(const Vector& y, const WeightMatrix& g) {
    const Eigen::Index n = g.w.rows();
    if (y.size() != n) throw ShapeMismatch("graph_sum_identity_check: length mismatch");
    double pair_sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            const double diff = y[i] - y[j];
            pair_sum += diff * diff * g.w(i, j);
        }
    }
    const Vector degrees = g.w.rowwise().sum();
    Matrix lap = -g.w;
    lap.diagonal() += degrees;
    const double quad = 2.0 * y.dot(lap * y);
    return std::abs(pair_sum - quad);
}

}  // namespace geu
