#pragma once

#include "gnrk/model.hpp"

namespace gnrk {

/// Cart-pole parameters. State ordering is [p, theta, v, omega]; theta = 0 is
/// the upright position and u is the horizontal force on the cart.
struct PendulumParams {
  double cart_mass = 1.0;      // [kg]
  double pole_mass = 0.1;      // [kg]
  double length = 0.5;         // [m]
  double gravity = 9.81;       // [m/s^2]

  void validate() const;
};

DynamicsModel make_pendulum_model(const PendulumParams& params);

/// Explicit right-hand side of the cart-pole ODE (convenience for tests and
/// the plant).
Vector pendulum_rhs(const PendulumParams& params, const Vector& x, double u);

/// Total mechanical energy; conserved when u = 0.
double pendulum_energy(const PendulumParams& params, const Vector& x);

struct PendulumCostWeights {
  Eigen::Vector4d Q_diag{100.0, 1e3, 0.01, 0.01};
  double R = 0.2;
  double gamma = 5e4;
  double p_min = -1.0;
  double p_max = 1.0;
};

/// Residual (x, u, max(p_min - p, 0), max(p - p_max, 0)) with
/// W = blockdiag(2Q, 2R, 2 gamma, 2 gamma), so that 1/2 ||r||_W^2 equals
/// x^T Q x + R u^2 + gamma max(p_min - p, 0)^2 + gamma max(p - p_max, 0)^2.
ResidualCost make_pendulum_cost(const Matrix& Q, double R, double gamma, double p_min,
                                double p_max);
ResidualCost make_pendulum_cost(const PendulumCostWeights& weights);

}  // namespace gnrk
