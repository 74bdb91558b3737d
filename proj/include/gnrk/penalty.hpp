#pragma once

#include <functional>

#include "gnrk/types.hpp"

namespace gnrk {

/// Soft constraint h(z) <= 0 penalized by rho(z) = gamma * max(h(z), 0)^2.
///
/// In least-squares form the residual is max(h(z), 0) paired with weight
/// 2 * gamma, so the penalty slots into a ResidualCost as an extra row.
struct L2MaxPenalty {
  std::function<double(ConstVectorRef z)> h;
  std::function<void(ConstVectorRef z, StridedVectorRef grad)> grad_h;
  double gamma = 0.0;

  /// h(z) = a^T z + b.
  static L2MaxPenalty affine(const Vector& a, double b, double gamma);

  double value(ConstVectorRef z) const;
  Vector gradient(ConstVectorRef z) const;
};

struct PenaltyResidual {
  double residual = 0.0;
  RowVector jacobian_row;
};

/// max(h(z), 0) and its Jacobian row. At h(z) = 0 the zero row is selected.
PenaltyResidual penalty_residual(const L2MaxPenalty& pen, ConstVectorRef z);

/// Allocation-free variant writing the Jacobian row into `jacobian_row`.
double penalty_residual(const L2MaxPenalty& pen, ConstVectorRef z, StridedRowRef jacobian_row);

/// 2 gamma grad_h grad_h^T where h(z) > 0, zero otherwise.
Matrix penalty_gn_hessian(const L2MaxPenalty& pen, ConstVectorRef z);

}  // namespace gnrk
