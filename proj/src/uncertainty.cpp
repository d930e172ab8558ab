#include "geu/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include "geu/errors.hpp"
#include "geu/kernels.hpp"

namespace geu {

Matrix nearest_neighbor_sq_diffs(const Dataset& x, bool supervised) {
    const Eigen::Index n = x.features.rows();
    const Eigen::Index dim = x.features.cols();
    if (n < 2) throw TooFewSamples("uncertainty estimation needs at least 2 samples");

    const auto counts = x.class_counts();
    Matrix base(n, dim);
    for (Eigen::Index i = 0; i < n; ++i) {
        const int ci = x.labels[static_cast<size_t>(i)];
        const bool restrict_class =
            supervised && counts[static_cast<size_t>(ci)] >= 2;
        double best = std::numeric_limits<double>::infinity();
        Eigen::Index best_j = -1;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == i) continue;
            if (restrict_class && x.labels[static_cast<size_t>(j)] != ci) continue;
            const double d = kernels::squared_distance(
                x.features.row(i).data(), x.features.row(j).data(),
                static_cast<std::size_t>(dim));
            if (d < best) {  // ties keep the smaller index
                best = d;
                best_j = j;
            }
        }
        base.row(i) =
            (x.features.row(i) - x.features.row(best_j)).array().square();
    }
    return base;
}

UncertaintyModel scale_uncertainty(const Matrix& base_sq_diffs, double sigma_scale,
                                   double floor) {
    if (sigma_scale < 0.0 || floor < 0.0) {
        throw NegativeVariance("sigma_scale and floor must be nonnegative");
    }
    UncertaintyModel u;
    u.diag_covs = (sigma_scale * base_sq_diffs.array()).max(floor);
    u.sigma_scale = sigma_scale;
    u.floor = floor;
    return u;
}

UncertaintyModel estimate_unsupervised(const Dataset& x, double sigma_scale,
                                       double floor) {
    return scale_uncertainty(nearest_neighbor_sq_diffs(x, false), sigma_scale, floor);
}

UncertaintyModel estimate_supervised(const Dataset& x, double sigma_scale,
                                     double floor) {
    return scale_uncertainty(nearest_neighbor_sq_diffs(x, true), sigma_scale, floor);
}

UncertaintyModel from_explicit(const Matrix& diag_covs) {
    if (diag_covs.size() > 0 && diag_covs.minCoeff() < 0.0) {
        throw NegativeVariance("explicit uncertainty contains negative variances");
    }
    UncertaintyModel u;
    u.diag_covs = diag_covs;
    u.sigma_scale = 1.0;
    u.floor = 0.0;
    return u;
}

double auto_floor(const Matrix& raw_variances) {
    std::vector<double> nonzero;
    nonzero.reserve(static_cast<size_t>(raw_variances.size()));
    for (Eigen::Index i = 0; i < raw_variances.rows(); ++i) {
        for (Eigen::Index j = 0; j < raw_variances.cols(); ++j) {
            if (raw_variances(i, j) > 0.0) nonzero.push_back(raw_variances(i, j));
        }
    }
    if (nonzero.empty()) return 0.0;
    const size_t mid = nonzero.size() / 2;
    std::nth_element(nonzero.begin(), nonzero.begin() + static_cast<long>(mid),
                     nonzero.end());
    return 1e-8 * nonzero[mid];
}

void save_uncertainty_csv(const UncertaintyModel& u, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    char buf[64];
    for (Eigen::Index j = 0; j < u.diag_covs.cols(); ++j) {
        out << (j ? "," : "") << "var_" << j;
    }
    out << "\n";
    for (Eigen::Index i = 0; i < u.diag_covs.rows(); ++i) {
        for (Eigen::Index j = 0; j < u.diag_covs.cols(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", u.diag_covs(i, j));
            out << (j ? "," : "") << buf;
        }
        out << "\n";
    }
}

UncertaintyModel load_uncertainty_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ": empty file");

    std::vector<std::vector<double>> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ParseError(path + ": line " + std::to_string(lineno) +
                                 ": non-numeric variance '" + cell + "'");
            }
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError(path + ": no variance rows");

    Matrix covs(static_cast<Eigen::Index>(rows.size()),
                static_cast<Eigen::Index>(rows[0].size()));
    for (size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows[0].size()) {
            throw ParseError(path + ": ragged variance row " + std::to_string(i + 2));
        }
        for (size_t j = 0; j < rows[i].size(); ++j) {
            covs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return from_explicit(covs);
}

}  // namespace geu
