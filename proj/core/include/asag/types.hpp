#pragma once

#include <Eigen/Core>

#include <vector>

namespace asag {

/// Row-major dense matrix; one sample per row.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Binary labels, 0 = incorrect and 1 = correct.
using Labels = std::vector<int>;

}  // namespace asag
