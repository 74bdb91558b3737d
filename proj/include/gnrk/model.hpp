#pragma once

#include <functional>

#include "gnrk/types.hpp"

namespace gnrk {

/// Implicit dynamics 0 = f_impl(t, x, xdot, u).
///
/// Callbacks write into caller-owned storage so that evaluation inside the
/// integrator does not allocate.
struct DynamicsModel {
  using EvalFn = std::function<void(double t, ConstVectorRef x, ConstVectorRef xdot,
                                    ConstVectorRef u, VectorRef out)>;
  using JacobianFn =
      std::function<void(double t, ConstVectorRef x, ConstVectorRef xdot, ConstVectorRef u,
                         MatrixRef jac_x, MatrixRef jac_xdot, MatrixRef jac_u)>;

  int nx = 0;
  int nu = 0;
  EvalFn eval;
  JacobianFn jacobians;

  Vector residual(double t, const Vector& x, const Vector& xdot, const Vector& u) const;
};

/// Explicit right-hand side xdot = f(t, x, u) and its Jacobians.
using ExplicitRhsFn =
    std::function<void(double t, ConstVectorRef x, ConstVectorRef u, VectorRef f)>;
using ExplicitJacobianFn = std::function<void(double t, ConstVectorRef x, ConstVectorRef u,
                                              MatrixRef df_dx, MatrixRef df_du)>;

/// Wraps xdot = f(t, x, u) as 0 = xdot - f(t, x, u); jac_xdot is the identity.
DynamicsModel make_explicit_model(int nx, int nu, ExplicitRhsFn f, ExplicitJacobianFn df);

/// xdot = A x + B u.
DynamicsModel make_lti_model(const Matrix& A, const Matrix& B);

/// Nonlinear least-squares running cost l(x, u) = 1/2 ||r(x, u)||_W^2.
class ResidualCost {
 public:
  using ResidualFn = std::function<void(ConstVectorRef x, ConstVectorRef u, VectorRef r)>;
  /// Jacobian w.r.t. the stacked (x, u), shape ny x (nx + nu).
  using JacobianFn = std::function<void(ConstVectorRef x, ConstVectorRef u, MatrixRef jac)>;

  /// Throws InvalidArgument unless W is symmetric positive definite.
  ResidualCost(int nx, int nu, int ny, ResidualFn r, JacobianFn jac, Matrix W);

  int nx() const { return nx_; }
  int nu() const { return nu_; }
  int ny() const { return ny_; }
  const Matrix& weight() const { return W_; }
  /// Upper-triangular U with W = U^T U.
  const Matrix& weight_factor() const { return U_; }

  void residual(ConstVectorRef x, ConstVectorRef u, VectorRef r) const { r_(x, u, r); }
  void jacobian(ConstVectorRef x, ConstVectorRef u, MatrixRef jac) const { jac_(x, u, jac); }

  Vector residual(const Vector& x, const Vector& u) const;
  Matrix jacobian(const Vector& x, const Vector& u) const;
  double value(const Vector& x, const Vector& u) const;

 private:
  int nx_;
  int nu_;
  int ny_;
  ResidualFn r_;
  JacobianFn jac_;
  Matrix W_;
  Matrix U_;
};

/// r(x, u) = (x, u) with the given (nx + nu) x (nx + nu) weight.
ResidualCost make_state_control_cost(int nx, int nu, const Matrix& W);

/// Cost-augmented model: state (x, c) with cdot = l(x, u).
DynamicsModel augment_with_cost_state(const DynamicsModel& model, const ResidualCost& cost);

}  // namespace gnrk
