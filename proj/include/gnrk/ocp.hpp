#pragma once

#include <optional>
#include <vector>

#include "gnrk/gnrk_cost.hpp"
#include "gnrk/irk.hpp"
#include "gnrk/model.hpp"

namespace gnrk {

/// Shooting nodes t_0 = 0 < t_1 < ... < t_N = T.
struct Grid {
  std::vector<double> t;

  int N() const { return static_cast<int>(t.size()) - 1; }
  double dt(int n) const { return t[n + 1] - t[n]; }
  double horizon() const { return t.back(); }
};

Grid make_grid_uniform(double T, int N);
/// dt_0 = Ts, remaining N - 1 intervals share T - Ts equally.
Grid make_grid_nonuniform(double T, int N, double Ts);

enum class CostDiscretization { SN, GNRK };

/// Multiple-shooting OCP: sum_n L_n(x_n, u_n) + x_N' P x_N subject to
/// x_0 = xbar_0, x_{n+1} = phi_n(x_n, u_n) and u_lo <= u_n <= u_hi.
struct OcpFormulation {
  DynamicsModel model;
  ResidualCost cost;
  Grid grid;
  Vector u_lo;
  Vector u_hi;
  Matrix P;
  CostDiscretization cost_discretization = CostDiscretization::GNRK;
  IrkSettings irk;

  int nx() const { return model.nx; }
  int nu() const { return model.nu; }
  int N() const { return grid.N(); }

  /// Throws InvalidArgument on inconsistent dimensions, bounds or grid.
  void validate() const;
};

struct NlpIterate {
  std::vector<Vector> x;       // N + 1
  std::vector<Vector> u;       // N
  std::vector<Vector> lam;     // N + 1; lam[0] belongs to x_0 = xbar_0
  std::vector<Vector> z_lo;    // N
  std::vector<Vector> z_hi;    // N

  /// States all equal to x0, zero controls and multipliers.
  static NlpIterate replicate(const OcpFormulation& ocp, const Vector& x0);
  bool all_finite() const;
};

/// Stage n of the QP in the step variables (dx_n, du_n):
///   1/2 [dx;du]' H [dx;du] + g' [dx;du],  dx_{n+1} = A dx + B du + c,
///   lb <= du <= ub.
struct QpStage {
  Matrix H;
  Vector g;
  Matrix A;
  Matrix B;
  Vector c;
  Vector lb;
  Vector ub;
};

struct QpData {
  int nx = 0;
  int nu = 0;
  std::vector<QpStage> stages;
  Matrix H_N;
  Vector g_N;
  /// NLP objective at the linearization point.
  double objective = 0.0;

  int N() const { return static_cast<int>(stages.size()); }
  void resize(int N, int nx, int nu);
};

/// Builds QpData from an iterate; owns integrator workspace. Deterministic.
class Linearizer {
 public:
  explicit Linearizer(OcpFormulation ocp);

  /// Integrator errors are rethrown tagged with the shooting interval index.
  void linearize(const NlpIterate& iterate, QpData& qp);

  const OcpFormulation& ocp() const { return ocp_; }
  /// Integrator steps performed so far (instrumentation).
  std::uint64_t integrator_steps() const { return irk_.step_count(); }

 private:
  OcpFormulation ocp_;
  IrkIntegrator irk_;
  GnrkCostAccumulator gnrk_;
  CostAccumulator sn_;
};

QpData linearize(const OcpFormulation& ocp, const NlpIterate& iterate);

}  // namespace gnrk
