#pragma once

#include <vector>

#include "gnrk/ocp.hpp"

namespace gnrk {

struct QpOptions {
  double tol = 1e-10;
  int max_iter = 100;
};

/// Primal-dual solution of the stagewise QP. Multiplier conventions:
///   lam[0] belongs to dx_0 = dx0_fix, lam[n + 1] to the dynamics of stage n,
///   z_lo / z_hi >= 0 to du_n >= lb_n / du_n <= ub_n (zero for inactive bounds).
struct QpSolution {
  std::vector<Vector> dx;
  std::vector<Vector> du;
  std::vector<Vector> lam;
  std::vector<Vector> z_lo;
  std::vector<Vector> z_hi;
  /// Scaled KKT residual, see KktResiduals::scaled.
  double kkt_residual = 0.0;
  int iterations = 0;
};

/// Normalization of the KKT residuals: `dual` for stationarity and
/// complementarity (max of 1, the largest Hessian/gradient entry and, in
/// qp_kkt_residuals, the largest multiplier term), `primal` for equalities
/// and bounds (max of 1, |c|, |dx0|, finite bounds).
struct KktScales {
  double dual = 1.0;
  double primal = 1.0;
};

KktScales qp_kkt_scales(const QpData& qp, ConstVectorRef dx0_fix);

struct KktResiduals {
  double stationarity = 0.0;
  double equality = 0.0;
  double bounds = 0.0;
  double complementarity = 0.0;
  KktScales scales;

  /// Largest absolute residual.
  double max() const;
  /// Largest residual after normalization; this is what the tolerance bounds.
  double scaled() const;
};

/// Infinity-norm KKT residuals of a primal-dual point.
KktResiduals qp_kkt_residuals(const QpData& qp, ConstVectorRef dx0_fix, const QpSolution& sol);

/// Mehrotra predictor-corrector interior-point method for the OCP-structured
/// QP. Every Newton system is solved by a backward Riccati recursion, so one
/// iteration costs O(N (nx + nu)^3).
class OcpQpSolver {
 public:
  /// Throws QpMaxIterations or NonConvexBlock.
  void solve(const QpData& qp, ConstVectorRef dx0_fix, const QpOptions& options, QpSolution& sol);

 private:
  void resize(const QpData& qp);
  void initialize(const QpData& qp, ConstVectorRef dx0_fix);
  void compute_residuals(const QpData& qp, ConstVectorRef dx0_fix);
  void update_sigma();
  void factorize(const QpData& qp);
  void solve_newton(const QpData& qp, bool corrector, double sigma_mu);
  double max_step() const;

  int N_ = -1;
  int nx_ = 0;
  int nu_ = 0;
  int n_bounds_ = 0;

  // Current point.
  std::vector<Vector> dx_, du_, lam_, t_lo_, t_hi_, z_lo_, z_hi_;
  std::vector<Eigen::Array<bool, Eigen::Dynamic, 1>> has_lo_, has_hi_;
  // Residuals.
  std::vector<Vector> r_x_, r_u_, r_dyn_, r_lo_, r_hi_;
  Vector r_N_, r_0_;
  // Newton direction (affine direction kept for the corrector).
  std::vector<Vector> d_x_, d_u_, d_lam_, d_tlo_, d_thi_, d_zlo_, d_zhi_;
  std::vector<Vector> a_tlo_, a_thi_, a_zlo_, a_zhi_;
  // Riccati workspace.
  std::vector<Matrix> P_, K_;
  std::vector<Vector> p_, k_, q_u_, sigma_;
  std::vector<Eigen::LLT<Matrix>> Rb_;
  std::vector<Matrix> Sb_;
};

QpSolution solve_qp(const QpData& qp, const Vector& dx0_fix, double tol);

}  // namespace gnrk
