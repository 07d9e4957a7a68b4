#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace pbitrc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
/// Compressed-row sparse storage for the recurrent weights.
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

} // namespace pbitrc
