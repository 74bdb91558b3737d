#pragma once

#include <cstdint>
#include <vector>

#include "gnrk/ocp.hpp"
#include "gnrk/ocp_qp.hpp"

namespace gnrk {

enum class SqpMode { ConvergedSQP, RTI };

struct SqpOptions {
  SqpMode mode = SqpMode::ConvergedSQP;
  /// Converged once the full step satisfies ||d_k||_inf <= tol_stationarity.
  double tol_stationarity = 1e-6;
  int max_iter = 400;
  double qp_tol = 1e-10;

  void validate() const;
};

struct SqpStats {
  /// Number of steps applied before the terminating (small) step. RTI: 1.
  int iterations = 0;
  bool converged = false;
  /// Norms of every computed step, including the terminating one.
  std::vector<double> step_norms_inf;
  std::vector<double> step_norms_2;
  int qp_iterations = 0;

  double time_preparation = 0.0;  // [s] linearization
  double time_feedback = 0.0;     // [s] QP solve and step application
  double time_total = 0.0;        // [s]

  // Instrumentation: integrator steps and QP solves attributed to each phase.
  std::uint64_t integrator_steps_preparation = 0;
  std::uint64_t integrator_steps_feedback = 0;
  int qp_solves_preparation = 0;
  int qp_solves_feedback = 0;

  /// kappa_k = ||d_{k+1}||_2 / ||d_k||_2.
  std::vector<double> contraction_rates() const;
};

struct SqpResult {
  NlpIterate iterate;
  SqpStats stats;
};

/// Full-step Gauss-Newton SQP without globalization; in RTI mode exactly one
/// iteration. Owns linearization and QP workspace; one instance per
/// controller.
class SqpSolver {
 public:
  SqpSolver(OcpFormulation ocp, SqpOptions options);

  /// Solves from the measured state x0, warm-started from `warm` when given
  /// (used as-is, no shifting). Integrator and QP errors propagate with the
  /// iteration index in the message; hitting max_iter is reported through
  /// stats.converged = false.
  SqpResult solve(const Vector& x0, const NlpIterate* warm = nullptr);

  const OcpFormulation& ocp() const { return linearizer_.ocp(); }
  const SqpOptions& options() const { return options_; }

 private:
  Linearizer linearizer_;
  SqpOptions options_;
  OcpQpSolver qp_solver_;
  QpData qp_;
  QpSolution qp_sol_;
};

/// Empirical contraction rates of a cold-started converged SQP run from x0.
/// Fewer than two steps yield an empty sequence.
std::vector<double> contraction_experiment(const OcpFormulation& ocp, const Vector& x0,
                                           SqpOptions options);

}  // namespace gnrk
