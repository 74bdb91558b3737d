#include "gnrk/pendulum.hpp"

#include <cmath>

#include "gnrk/errors.hpp"
#include "gnrk/penalty.hpp"

namespace gnrk {

void PendulumParams::validate() const {
  if (!(cart_mass > 0.0 && pole_mass > 0.0 && length > 0.0 && gravity > 0.0))
    throw InvalidArgument("PendulumParams: all parameters must be strictly positive");
}

namespace {

void rhs(const PendulumParams& prm, ConstVectorRef x, double F, VectorRef f) {
  const double M = prm.cart_mass;
  const double m = prm.pole_mass;
  const double l = prm.length;
  const double g = prm.gravity;
  const double c = std::cos(x(1));
  const double s = std::sin(x(1));
  const double w = x(3);
  const double den = M + m - m * c * c;
  f(0) = x(2);
  f(1) = w;
  f(2) = (-m * l * s * w * w + m * g * c * s + F) / den;
  f(3) = (-m * l * c * s * w * w + F * c + (M + m) * g * s) / (l * den);
}

void rhs_jacobian(const PendulumParams& prm, ConstVectorRef x, double F, MatrixRef df_dx,
                  MatrixRef df_du) {
  const double M = prm.cart_mass;
  const double m = prm.pole_mass;
  const double l = prm.length;
  const double g = prm.gravity;
  const double c = std::cos(x(1));
  const double s = std::sin(x(1));
  const double w = x(3);
  const double den = M + m - m * c * c;
  const double dden = 2.0 * m * s * c;

  const double num1 = -m * l * s * w * w + m * g * c * s + F;
  const double dnum1_dth = -m * l * c * w * w + m * g * (c * c - s * s);
  const double num2 = -m * l * c * s * w * w + F * c + (M + m) * g * s;
  const double dnum2_dth = -m * l * (c * c - s * s) * w * w - F * s + (M + m) * g * c;

  df_dx.setZero();
  df_dx(0, 2) = 1.0;
  df_dx(1, 3) = 1.0;
  df_dx(2, 1) = (dnum1_dth * den - num1 * dden) / (den * den);
  df_dx(2, 3) = -2.0 * m * l * s * w / den;
  df_dx(3, 1) = (dnum2_dth * den - num2 * dden) / (l * den * den);
  df_dx(3, 3) = -2.0 * m * l * c * s * w / (l * den);

  df_du(0, 0) = 0.0;
  df_du(1, 0) = 0.0;
  df_du(2, 0) = 1.0 / den;
  df_du(3, 0) = c / (l * den);
}

}  // namespace

DynamicsModel make_pendulum_model(const PendulumParams& params) {
  params.validate();
  return make_explicit_model(
      4, 1,
      [params](double, ConstVectorRef x, ConstVectorRef u, VectorRef f) {
        rhs(params, x, u(0), f);
      },
      [params](double, ConstVectorRef x, ConstVectorRef u, MatrixRef df_dx, MatrixRef df_du) {
        rhs_jacobian(params, x, u(0), df_dx, df_du);
      });
}

Vector pendulum_rhs(const PendulumParams& params, const Vector& x, double u) {
  Vector f(4);
  rhs(params, x, u, f);
  return f;
}

double pendulum_energy(const PendulumParams& params, const Vector& x) {
  const double M = params.cart_mass;
  const double m = params.pole_mass;
  const double l = params.length;
  const double v = x(2);
  const double w = x(3);
  const double c = std::cos(x(1));
  return 0.5 * (M + m) * v * v - m * l * c * v * w + 0.5 * m * l * l * w * w +
         m * params.gravity * l * c;
}

ResidualCost make_pendulum_cost(const Matrix& Q, double R, double gamma, double p_min,
                                double p_max) {
  if (Q.rows() != 4 || Q.cols() != 4) throw InvalidArgument("make_pendulum_cost: Q must be 4x4");
  // W has to be definite, so a zero diagonal entry in Q is rejected as well.
  if (!Q.isDiagonal(0.0) || (Q.diagonal().array() <= 0.0).any())
    throw InvalidArgument("make_pendulum_cost: Q must be diagonal with positive entries");
  if (!(R > 0.0)) throw InvalidArgument("make_pendulum_cost: R must be positive");
  if (!(gamma > 0.0)) throw InvalidArgument("make_pendulum_cost: gamma must be positive");
  if (!(p_min < p_max)) throw InvalidArgument("make_pendulum_cost: need p_min < p_max");

  // Penalties act on z = (x, u).
  Vector a_lo = Vector::Zero(5);
  a_lo(0) = -1.0;
  Vector a_hi = Vector::Zero(5);
  a_hi(0) = 1.0;
  const L2MaxPenalty lower = L2MaxPenalty::affine(a_lo, p_min, gamma);
  const L2MaxPenalty upper = L2MaxPenalty::affine(a_hi, -p_max, gamma);

  Matrix W = Matrix::Zero(7, 7);
  W.topLeftCorner(4, 4) = 2.0 * Q;
  W(4, 4) = 2.0 * R;
  W(5, 5) = 2.0 * gamma;
  W(6, 6) = 2.0 * gamma;

  return ResidualCost(
      4, 1, 7,
      [lower, upper](ConstVectorRef x, ConstVectorRef u, VectorRef r) {
        Eigen::Matrix<double, 5, 1> z;
        z << x, u;
        r.head<4>() = x;
        r(4) = u(0);
        r(5) = std::max(lower.h(z), 0.0);
        r(6) = std::max(upper.h(z), 0.0);
      },
      [lower, upper](ConstVectorRef x, ConstVectorRef u, MatrixRef jac) {
        Eigen::Matrix<double, 5, 1> z;
        z << x, u;
        jac.topRows<5>().setIdentity();
        penalty_residual(lower, z, jac.row(5));
        penalty_residual(upper, z, jac.row(6));
      },
      W);
}

ResidualCost make_pendulum_cost(const PendulumCostWeights& weights) {
  return make_pendulum_cost(weights.Q_diag.asDiagonal().toDenseMatrix(), weights.R,
                            weights.gamma, weights.p_min, weights.p_max);
}

}  // namespace gnrk
