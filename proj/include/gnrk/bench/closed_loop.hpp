#pragma once

#include <string>
#include <vector>

#include "gnrk/bench/config.hpp"
#include "gnrk/errors.hpp"
#include "gnrk/irk.hpp"
#include "gnrk/sqp.hpp"

namespace gnrk::bench {

struct PlantStep {
  Vector x_next;
  double cost_increment = 0.0;
};

/// Plant simulator: one Radau IIA (4 stages) step per sampling period on the
/// pendulum model augmented with the cost state cdot = l_pend(x, u).
class Plant {
 public:
  Plant(const PendulumParams& params, const PendulumCostWeights& weights,
        IrkSettings settings = {});

  PlantStep step(const Vector& x, const Vector& u, double Ts);

 private:
  IrkIntegrator integrator_;
  Vector xa_;
};

/// Builds the pendulum OCP of a variant, including the Riccati terminal cost.
OcpFormulation make_pendulum_ocp(const VariantConfig& cfg);

struct ClosedLoopResult {
  std::string variant;
  std::vector<double> t;          // sampling instants, steps + 1
  std::vector<Vector> x;          // steps + 1
  std::vector<double> u;          // steps
  std::vector<double> cost_state;  // steps + 1, starts at 0
  std::vector<int> iterations;    // per solver call
  std::vector<double> solve_time;  // [s] per solver call
  std::vector<double> preparation_time;  // [s]
  std::vector<double> feedback_time;     // [s]
  std::vector<bool> converged;

  double total_cost() const { return cost_state.empty() ? 0.0 : cost_state.back(); }
  double final_state_inf_norm() const;
  int max_iterations() const;
  double median_iterations() const;
};

/// Thrown when a solver call fails during a closed-loop run.
class ClosedLoopFailure : public Error {
 public:
  ClosedLoopFailure(int step, const std::string& what)
      : Error("closed loop step " + std::to_string(step) + ": " + what), step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

/// Simulates sim_duration seconds: at every sampling instant the controller is
/// solved from the measured state (warm-started with its previous solution),
/// u_0 is applied for Ts. The wall time of each solver call is recorded.
ClosedLoopResult run_closed_loop(const VariantConfig& cfg);

/// 100 (J - J_base) / J_base on the plant cost state.
double relative_suboptimality(const ClosedLoopResult& result, const ClosedLoopResult& baseline);

struct TimingSummary {
  double t_min_ms = 0.0;
  double t_median_ms = 0.0;
  double t_max_ms = 0.0;
};

/// Order statistics over sampling instants of per-instant solver times.
TimingSummary summarize_times(const std::vector<double>& seconds);

struct TimedResult {
  ClosedLoopResult result;  // from the first repeat
  std::vector<double> min_solve_time;  // [s] per instant, minimum over repeats
  TimingSummary timing;
};

/// Runs the identical closed loop `repeats` times sequentially, keeps the
/// per-instant minimum solver time and reports min/median/max over instants.
TimedResult timing_protocol(const VariantConfig& cfg, int repeats = 5);

}  // namespace gnrk::bench
