#pragma once

#include <string>
#include <vector>

#include "gnrk/ocp.hpp"
#include "gnrk/pendulum.hpp"

namespace gnrk::bench {

enum class GridKind { Uniform, Nonuniform };
enum class Algorithm { SQP, RTI };
/// Quadratic: M(x) = x'Px. Nls: residual x with weight P, M(x) = x'Px / 2.
enum class TerminalCost { Quadratic, Nls };

/// One controller variant of the closed-loop study plus the scenario it runs.
struct VariantConfig {
  std::string id;
  // Hessian approximation is always Gauss-Newton.
  CostDiscretization cost_discretization = CostDiscretization::GNRK;
  GridKind grid = GridKind::Nonuniform;
  Algorithm algorithm = Algorithm::RTI;
  int N = 20;
  double T = 4.0;
  double Ts = 0.02;
  int n_stages = 4;
  int n_steps = 1;

  PendulumParams pendulum;
  PendulumCostWeights weights;
  double u_min = -40.0;
  double u_max = 40.0;
  Eigen::Vector4d x0{0.0, 0.7853981633974483, 0.0, 0.0};

  // Terminal weight: DARE on the linearization discretized over dare_dt
  // (0 means Ts), with stage weights Q dare_dt, R dare_dt when
  // dare_scale_weights, else Q, R.
  double dare_dt = 0.0;
  bool dare_scale_weights = true;
  TerminalCost terminal_cost = TerminalCost::Nls;

  double sim_duration = 4.0;
  int timing_repeats = 5;

  double tol_stationarity = 1e-6;
  int max_iter = 400;
  double qp_tol = 1e-10;

  void validate() const;
  /// Short human-readable summary, e.g. "GNRK N=20 T=4 RTI nonuniform".
  std::string describe() const;
};

struct BenchConfig {
  int schema = 1;
  /// Id of the variant used as the suboptimality reference. Empty: a default
  /// GNRK N=200 uniform converged-SQP controller is run as reference.
  std::string baseline;
  std::vector<double> contraction_theta0;
  std::vector<VariantConfig> variants;

  const VariantConfig* find(const std::string& id) const;
  /// The reference controller, either from `baseline` or the default one.
  VariantConfig baseline_variant() const;
};

/// Parses the flat key = value configuration (see docs/config.md). Throws
/// InvalidArgument with the offending key on any error.
BenchConfig parse_config_file(const std::string& path);
BenchConfig parse_config_string(const std::string& text);

std::string to_string(CostDiscretization d);
std::string to_string(GridKind g);
std::string to_string(Algorithm a);
std::string to_string(TerminalCost c);

}  // namespace gnrk::bench
