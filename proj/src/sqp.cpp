#include "gnrk/sqp.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "gnrk/errors.hpp"

namespace gnrk {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

void SqpOptions::validate() const {
  if (max_iter < 1) throw InvalidArgument("SqpOptions: max_iter must be >= 1");
  if (!(tol_stationarity > 0.0) || !(qp_tol > 0.0))
    throw InvalidArgument("SqpOptions: tolerances must be positive");
}

std::vector<double> SqpStats::contraction_rates() const {
  std::vector<double> kappa;
  for (std::size_t k = 0; k + 1 < step_norms_2.size(); ++k)
    kappa.push_back(step_norms_2[k + 1] / step_norms_2[k]);
  return kappa;
}

SqpSolver::SqpSolver(OcpFormulation ocp, SqpOptions options)
    : linearizer_(std::move(ocp)), options_(options) {
  options_.validate();
}

SqpResult SqpSolver::solve(const Vector& x0, const NlpIterate* warm) {
  const OcpFormulation& ocp = linearizer_.ocp();
  if (x0.size() != ocp.nx() || !x0.allFinite()) throw InvalidArgument("SqpSolver: invalid x0");
  const int N = ocp.N();

  SqpResult result;
  result.iterate = warm != nullptr ? *warm : NlpIterate::replicate(ocp, x0);
  NlpIterate& it = result.iterate;
  SqpStats& stats = result.stats;
  if (static_cast<int>(it.x.size()) != N + 1 || static_cast<int>(it.u.size()) != N)
    throw InvalidArgument("SqpSolver: warm start does not match the grid");

  QpOptions qp_options;
  qp_options.tol = options_.qp_tol;
  const int max_iter = options_.mode == SqpMode::RTI ? 1 : options_.max_iter;
  const auto t_start = Clock::now();

  for (int k = 0; k < max_iter; ++k) {
    // Preparation: integration and linearization at the current iterate.
    const auto t_prep = Clock::now();
    const std::uint64_t steps_before = linearizer_.integrator_steps();
    try {
      linearizer_.linearize(it, qp_);
    } catch (Error& e) {
      throw IntegratorError("SQP iteration " + std::to_string(k) + ": " + e.what());
    }
    stats.integrator_steps_preparation += linearizer_.integrator_steps() - steps_before;
    stats.time_preparation += seconds_since(t_prep);

    // Feedback: QP solve with the measured state and step application.
    const auto t_fb = Clock::now();
    const std::uint64_t steps_fb = linearizer_.integrator_steps();
    const Vector dx0 = x0 - it.x[0];
    try {
      qp_solver_.solve(qp_, dx0, qp_options, qp_sol_);
    } catch (QpMaxIterations& e) {
      throw QpMaxIterations("SQP iteration " + std::to_string(k) + ": " + e.what());
    } catch (NonConvexBlock& e) {
      throw NonConvexBlock("SQP iteration " + std::to_string(k) + ": " + e.what());
    }
    ++stats.qp_solves_feedback;
    stats.qp_iterations += qp_sol_.iterations;

    double norm_inf = 0.0;
    double norm_sq = 0.0;
    for (int n = 0; n <= N; ++n) {
      it.x[n] += qp_sol_.dx[n];
      it.lam[n] = qp_sol_.lam[n];
      norm_inf = std::max(norm_inf, qp_sol_.dx[n].lpNorm<Eigen::Infinity>());
      norm_sq += qp_sol_.dx[n].squaredNorm();
    }
    for (int n = 0; n < N; ++n) {
      it.u[n] += qp_sol_.du[n];
      it.z_lo[n] = qp_sol_.z_lo[n];
      it.z_hi[n] = qp_sol_.z_hi[n];
      norm_inf = std::max(norm_inf, qp_sol_.du[n].lpNorm<Eigen::Infinity>());
      norm_sq += qp_sol_.du[n].squaredNorm();
    }
    stats.integrator_steps_feedback += linearizer_.integrator_steps() - steps_fb;
    stats.time_feedback += seconds_since(t_fb);
    stats.step_norms_inf.push_back(norm_inf);
    stats.step_norms_2.push_back(std::sqrt(norm_sq));

    if (options_.mode == SqpMode::RTI) {
      stats.iterations = 1;
      stats.converged = norm_inf <= options_.tol_stationarity;
      break;
    }
    if (norm_inf <= options_.tol_stationarity) {
      stats.converged = true;
      break;
    }
    stats.iterations = k + 1;
  }
  stats.time_total = seconds_since(t_start);
  return result;
}

std::vector<double> contraction_experiment(const OcpFormulation& ocp, const Vector& x0,
                                           SqpOptions options) {
  options.mode = SqpMode::ConvergedSQP;
  SqpSolver solver(ocp, options);
  const SqpResult res = solver.solve(x0);
  return res.stats.contraction_rates();
}

}  // namespace gnrk
