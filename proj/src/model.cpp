#include "gnrk/model.hpp"

#include <cmath>
#include <utility>

#include "gnrk/errors.hpp"

namespace gnrk {

Vector DynamicsModel::residual(double t, const Vector& x, const Vector& xdot,
                               const Vector& u) const {
  Vector out(nx);
  eval(t, x, xdot, u, out);
  return out;
}

DynamicsModel make_explicit_model(int nx, int nu, ExplicitRhsFn f, ExplicitJacobianFn df) {
  if (nx <= 0 || nu < 0) throw InvalidArgument("make_explicit_model: bad dimensions");
  DynamicsModel model;
  model.nx = nx;
  model.nu = nu;
  model.eval = [f](double t, ConstVectorRef x, ConstVectorRef xdot, ConstVectorRef u,
                   VectorRef out) {
    f(t, x, u, out);
    out = xdot - out;
  };
  model.jacobians = [df](double t, ConstVectorRef x, ConstVectorRef /*xdot*/, ConstVectorRef u,
                         MatrixRef jac_x, MatrixRef jac_xdot, MatrixRef jac_u) {
    df(t, x, u, jac_x, jac_u);
    jac_x = -jac_x;
    jac_u = -jac_u;
    jac_xdot.setIdentity();
  };
  return model;
}

DynamicsModel make_lti_model(const Matrix& A, const Matrix& B) {
  if (A.rows() != A.cols() || B.rows() != A.rows())
    throw InvalidArgument("make_lti_model: inconsistent shapes");
  return make_explicit_model(
      static_cast<int>(A.rows()), static_cast<int>(B.cols()),
      [A, B](double, ConstVectorRef x, ConstVectorRef u, VectorRef f) {
        f.noalias() = A * x;
        f.noalias() += B * u;
      },
      [A, B](double, ConstVectorRef, ConstVectorRef, MatrixRef df_dx, MatrixRef df_du) {
        df_dx = A;
        df_du = B;
      });
}

ResidualCost::ResidualCost(int nx, int nu, int ny, ResidualFn r, JacobianFn jac, Matrix W)
    : nx_(nx), nu_(nu), ny_(ny), r_(std::move(r)), jac_(std::move(jac)), W_(std::move(W)) {
  if (nx <= 0 || nu < 0 || ny <= 0) throw InvalidArgument("ResidualCost: bad dimensions");
  if (W_.rows() != ny || W_.cols() != ny) throw InvalidArgument("ResidualCost: W must be ny x ny");
  const double scale = std::max(1.0, W_.cwiseAbs().maxCoeff());
  if ((W_ - W_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw InvalidArgument("ResidualCost: W is not symmetric");
  Eigen::LLT<Matrix> llt(W_);
  if (llt.info() != Eigen::Success) throw InvalidArgument("ResidualCost: W is not positive definite");
  U_ = llt.matrixU();
}

Vector ResidualCost::residual(const Vector& x, const Vector& u) const {
  Vector r(ny_);
  r_(x, u, r);
  return r;
}

Matrix ResidualCost::jacobian(const Vector& x, const Vector& u) const {
  Matrix J(ny_, nx_ + nu_);
  jac_(x, u, J);
  return J;
}

double ResidualCost::value(const Vector& x, const Vector& u) const {
  const Vector r = residual(x, u);
  return 0.5 * r.dot(W_ * r);
}

ResidualCost make_state_control_cost(int nx, int nu, const Matrix& W) {
  return ResidualCost(
      nx, nu, nx + nu,
      [nx, nu](ConstVectorRef x, ConstVectorRef u, VectorRef r) {
        r.head(nx) = x;
        r.tail(nu) = u;
      },
      [](ConstVectorRef, ConstVectorRef, MatrixRef jac) { jac.setIdentity(); }, W);
}

DynamicsModel augment_with_cost_state(const DynamicsModel& model, const ResidualCost& cost) {
  const int nx = model.nx;
  const int nu = model.nu;
  const int ny = cost.ny();
  DynamicsModel aug;
  aug.nx = nx + 1;
  aug.nu = nu;
  aug.eval = [model, cost, nx, ny](double t, ConstVectorRef x, ConstVectorRef xdot,
                                   ConstVectorRef u, VectorRef out) {
    model.eval(t, x.head(nx), xdot.head(nx), u, out.head(nx));
    Eigen::VectorXd r(ny);
    cost.residual(x.head(nx), u, r);
    out(nx) = xdot(nx) - 0.5 * r.dot(cost.weight() * r);
  };
  aug.jacobians = [model, cost, nx, nu, ny](double t, ConstVectorRef x, ConstVectorRef xdot,
                                            ConstVectorRef u, MatrixRef jac_x,
                                            MatrixRef jac_xdot, MatrixRef jac_u) {
    jac_x.setZero();
    jac_xdot.setZero();
    jac_u.setZero();
    model.jacobians(t, x.head(nx), xdot.head(nx), u, jac_x.topLeftCorner(nx, nx),
                    jac_xdot.topLeftCorner(nx, nx), jac_u.topRows(nx));
    Eigen::VectorXd r(ny);
    Eigen::MatrixXd J(ny, nx + nu);
    cost.residual(x.head(nx), u, r);
    cost.jacobian(x.head(nx), u, J);
    // d l / d(x, u) = J^T W r
    const Eigen::RowVectorXd grad = (cost.weight() * r).transpose() * J;
    jac_x.row(nx).head(nx) = -grad.head(nx);
    jac_u.row(nx) = -grad.tail(nu);
    jac_xdot(nx, nx) = 1.0;
  };
  return aug;
}

}  // namespace gnrk
