#pragma once

#include <string>

#include "geu/data.hpp"
#include "geu/types.hpp"

namespace geu {

// Per-sample diagonal Gaussian covariance: row i holds the variance of
// sample i along each feature, floored at `floor`.
struct UncertaintyModel {
    Matrix diag_covs;  // N x D
    double sigma_scale = 0.0;
    double floor = 0.0;

    bool all_zero() const { return diag_covs.size() == 0 || diag_covs.maxCoeff() == 0.0; }
};

// Squared difference to the nearest admissible neighbor per sample, before
// any sigma scaling or flooring. The supervised variant restricts the
// admissible set to same-class samples, falling back to the full set for
// singleton classes. Shared base for both estimators; cached by the
// experiment harness across the sigma grid.
Matrix nearest_neighbor_sq_diffs(const Dataset& x, bool supervised);

// sigma-scaled and floored model from a precomputed base.
UncertaintyModel scale_uncertainty(const Matrix& base_sq_diffs, double sigma_scale,
                                   double floor);

UncertaintyModel estimate_unsupervised(const Dataset& x, double sigma_scale,
                                       double floor);
UncertaintyModel estimate_supervised(const Dataset& x, double sigma_scale,
                                     double floor);

UncertaintyModel from_explicit(const Matrix& diag_covs);

// Default variance floor: 1e-8 times the median nonzero entry (0 when all
// entries are zero).
double auto_floor(const Matrix& raw_variances);

// CSV with header var_0..var_{D-1}, one row per sample.
void save_uncertainty_csv(const UncertaintyModel& u, const std::string& path);
UncertaintyModel load_uncertainty_csv(const std::string& path);

}  // namespace geu
