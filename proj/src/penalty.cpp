#include "gnrk/penalty.hpp"

#include <algorithm>

#include "gnrk/errors.hpp"

namespace gnrk {

L2MaxPenalty L2MaxPenalty::affine(const Vector& a, double b, double gamma) {
  if (gamma < 0.0) throw InvalidArgument("L2MaxPenalty: gamma must be nonnegative");
  L2MaxPenalty pen;
  pen.h = [a, b](ConstVectorRef z) { return a.dot(z) + b; };
  pen.grad_h = [a](ConstVectorRef, StridedVectorRef grad) { grad = a; };
  pen.gamma = gamma;
  return pen;
}

double L2MaxPenalty::value(ConstVectorRef z) const {
  const double v = std::max(h(z), 0.0);
  return gamma * v * v;
}

Vector L2MaxPenalty::gradient(ConstVectorRef z) const {
  Vector g = Vector::Zero(z.size());
  const double v = h(z);
  if (v > 0.0) {
    grad_h(z, g);
    g *= 2.0 * gamma * v;
  }
  return g;
}

double penalty_residual(const L2MaxPenalty& pen, ConstVectorRef z,
                        StridedRowRef jacobian_row) {
  const double v = pen.h(z);
  if (v > 0.0) {
    pen.grad_h(z, jacobian_row.transpose());
    return v;
  }
  jacobian_row.setZero();
  return 0.0;
}

PenaltyResidual penalty_residual(const L2MaxPenalty& pen, ConstVectorRef z) {
  PenaltyResidual out;
  out.jacobian_row.resize(z.size());
  out.residual = penalty_residual(pen, z, out.jacobian_row);
  return out;
}

Matrix penalty_gn_hessian(const L2MaxPenalty& pen, ConstVectorRef z) {
  const PenaltyResidual pr = penalty_residual(pen, z);
  return 2.0 * pen.gamma * pr.jacobian_row.transpose() * pr.jacobian_row;
}

}  // namespace gnrk
