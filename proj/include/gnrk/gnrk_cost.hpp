#pragma once

#include <cstddef>

#include "gnrk/irk.hpp"
#include "gnrk/model.hpp"

namespace gnrk {

/// Cost value, gradient and Gauss-Newton Hessian w.r.t. w = (x, u).
struct CostTerms {
  double L = 0.0;
  Vector grad;
  Matrix H;
};

/// Result of integrating one shooting interval.
struct StepOutput {
  Vector x_next;
  /// d x_next / d(x_n, u_n), nx x (nx + nu).
  Matrix S;
  double L = 0.0;
  Vector grad;
  Matrix H;
};

/// Accumulates weighted least-squares terms
///   L += w/2 ||r||_W^2,  grad += w Jt^T W r,  H += w Jt^T W Jt
/// where Jt = J * [ds/dw; 0 I] is the residual Jacobian chained through the
/// sensitivity of the evaluation point. Workspace depends on (nx, nu, ny) only.
class CostAccumulator {
 public:
  explicit CostAccumulator(const ResidualCost& cost);

  void reset();

  /// Evaluation point (x_n, u_n) itself.
  void add_point(double weight, ConstVectorRef x, ConstVectorRef u);
  /// Evaluation point s with d s / d(x_n, u_n) = ds_dw (nx x (nx + nu)).
  void add_point(double weight, ConstVectorRef s, ConstVectorRef u, ConstMatrixRef ds_dw);

  /// Symmetrizes the Hessian. Call once after the last add_point().
  void finalize();

  double cost() const { return L_; }
  const Vector& gradient() const { return grad_; }
  const Matrix& hessian() const { return H_; }

  std::size_t workspace_size() const;

 private:
  void accumulate(double weight);

  ResidualCost cost_;
  int nx_;
  int nu_;
  double L_ = 0.0;
  Vector grad_;
  Matrix H_;
  Vector r_;
  Vector Ur_;
  Matrix J_;
  Matrix Jt_;
  Matrix M_;
  Vector sqrt_weight_;  // diagonal of the weight factor when W is diagonal, else empty
};

/// GNRK cost integration: observes the integrator and accumulates, for every
/// stage j of every substep,
///   L += h b_j / 2 ||r(s_j, u)||_W^2, grad += h b_j Jt_j^T W r_j,
///   H += h b_j Jt_j^T W Jt_j.
class GnrkCostAccumulator : public StageObserver {
 public:
  explicit GnrkCostAccumulator(const ResidualCost& cost) : acc_(cost) {}

  void reset() { acc_.reset(); }
  void on_substep(const SubstepView& view) override;
  void finalize() { acc_.finalize(); }

  double cost() const { return acc_.cost(); }
  const Vector& gradient() const { return acc_.gradient(); }
  const Matrix& hessian() const { return acc_.hessian(); }
  std::size_t workspace_size() const { return acc_.workspace_size(); }

 private:
  CostAccumulator acc_;
};

/// Shooting-node cost: L = dt l(x, u), grad = dt J^T W r, H = dt J^T W J.
CostTerms sn_cost_terms(const ResidualCost& cost, double dt, const Vector& x, const Vector& u);

/// Integrator with simultaneous GNRK cost integration over one interval.
class GnrkIntegrator {
 public:
  GnrkIntegrator(DynamicsModel model, const ResidualCost& cost, IrkSettings settings);

  void step(double t0, double dt, ConstVectorRef x0, ConstVectorRef u, StepOutput& out);
  StepOutput step(double t0, double dt, const Vector& x0, const Vector& u);

  IrkIntegrator& integrator() { return irk_; }
  std::size_t workspace_size() const { return irk_.workspace_size() + acc_.workspace_size(); }

 private:
  IrkIntegrator irk_;
  GnrkCostAccumulator acc_;
};

}  // namespace gnrk
