#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gnrk/butcher.hpp"
#include "gnrk/model.hpp"

namespace gnrk {

struct IrkSettings {
  ButcherTableau tableau = radau_iia(4);
  int n_steps = 1;
  /// Infinity-norm tolerance on the stage equations.
  double newton_tol = 1e-12;
  int newton_max_iter = 20;

  void validate() const;
};

/// Stage data of one integration substep. References are only valid for the
/// duration of the observer callback.
struct SubstepView {
  int substep;
  double t;  // substep start time
  double h;  // substep length
  const ButcherTableau& tableau;
  ConstVectorRef u;
  /// nx x s, column j holds the stage state s_j.
  const Matrix& stage_states;
  /// (s * nx) x (nx + nu); rows j * nx .. j * nx + nx - 1 hold ds_j / d(x_n, u_n).
  const Matrix& stage_sensitivities;
};

class StageObserver {
 public:
  virtual ~StageObserver() = default;
  virtual void on_substep(const SubstepView& view) = 0;
};

/// Implicit Runge-Kutta integrator with forward sensitivities.
///
/// Each substep solves the s * nx stage equations
///   0 = f_impl(t_j, x + h sum_l a_jl k_l, k_j, u)
/// by a simplified Newton iteration. The stage Jacobian factorized at the
/// converged point of one substep is reused as the Newton matrix of the next
/// substep and refreshed whenever the residual contracts by less than a factor
/// of ten. A step taken with a fresh Jacobian that increases the residual is
/// halved. Sensitivities follow from the implicit function theorem at the
/// converged stages.
///
/// Owns all workspace; sizes depend on (nx, nu, s) only. One instance per
/// thread of execution.
class IrkIntegrator {
 public:
  IrkIntegrator(DynamicsModel model, IrkSettings settings);

  /// Integrates over [t0, t0 + dt] with piecewise-constant control u. Throws
  /// NewtonNonConvergence or SingularStageJacobian.
  void step(double t0, double dt, ConstVectorRef x0, ConstVectorRef u,
            StageObserver* observer = nullptr);

  const Vector& x_next() const { return x_; }
  /// d x_next / d(x0, u), nx x (nx + nu).
  const Matrix& sensitivity() const { return Xw_; }

  int newton_iterations() const { return newton_iterations_; }
  int jacobian_factorizations() const { return factorizations_; }
  std::uint64_t step_count() const { return step_count_; }

  /// Number of doubles held in the workspace.
  std::size_t workspace_size() const;

  const DynamicsModel& model() const { return model_; }
  const IrkSettings& settings() const { return settings_; }

 private:
  void evaluate_stages(double t, double h, ConstVectorRef u);
  void factorize_stage_jacobian(double t, double h, ConstVectorRef u);

  DynamicsModel model_;
  IrkSettings settings_;
  int nx_;
  int nu_;
  int ns_;

  Vector x_;
  Matrix Xw_;
  Matrix K_;            // nx x s
  Vector residual_;     // s * nx
  Vector delta_;        // s * nx
  Matrix stage_states_;   // nx x s
  Matrix jac_x_;        // nx x (s * nx)
  Matrix jac_xdot_;     // nx x (s * nx)
  Matrix jac_u_;        // nx x (s * nu)
  Matrix newton_matrix_;  // (s * nx) x (s * nx)
  Eigen::PartialPivLU<Matrix> lu_;
  Matrix sens_rhs_;     // (s * nx) x (nx + nu)
  Matrix dK_dw_;        // (s * nx) x (nx + nu)
  Matrix stage_sens_;   // (s * nx) x (nx + nu)

  int newton_iterations_ = 0;
  int factorizations_ = 0;
  std::uint64_t step_count_ = 0;
};

/// Stage values of one substep as recorded by record_stages().
struct RecordedSubstep {
  double t;
  double h;
  Matrix stage_states;
  Matrix stage_sensitivities;
};

struct IrkStepResult {
  Vector x_next;
  Matrix S;
  std::vector<RecordedSubstep> substeps;
};

/// One-shot integration that also records all stage values and their
/// sensitivities. Intended for inspection; solvers use IrkIntegrator directly.
IrkStepResult irk_step_with_sens(const DynamicsModel& model, const IrkSettings& settings,
                                 double t0, double dt, const Vector& x0, const Vector& u);

}  // namespace gnrk
