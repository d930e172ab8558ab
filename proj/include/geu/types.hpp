#pragma once

#include <Eigen/Dense>
#include <vector>

namespace geu {

// Samples are stored row-wise (one sample per contiguous row), so the
// distance kernels can run on raw row pointers.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Labels = std::vector<int>;

}  // namespace geu
