#pragma once

#include <Eigen/Dense>

namespace gnrk {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowVector = Eigen::RowVectorXd;

using VectorRef = Eigen::Ref<Eigen::VectorXd>;
using ConstVectorRef = Eigen::Ref<const Eigen::VectorXd>;
using MatrixRef = Eigen::Ref<Eigen::MatrixXd>;
using ConstMatrixRef = Eigen::Ref<const Eigen::MatrixXd>;

/// Views that also bind to matrix rows (non-unit inner stride).
using StridedVectorRef = Eigen::Ref<Eigen::VectorXd, 0, Eigen::InnerStride<>>;
using StridedRowRef = Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>>;

}  // namespace gnrk
