#include "gnrk/gnrk_cost.hpp"

#include "gnrk/errors.hpp"

namespace gnrk {

CostAccumulator::CostAccumulator(const ResidualCost& cost)
    : cost_(cost), nx_(cost.nx()), nu_(cost.nu()) {
  const int nw = nx_ + nu_;
  const int ny = cost.ny();
  grad_.resize(nw);
  H_.resize(nw, nw);
  r_.resize(ny);
  Ur_.resize(ny);
  J_.resize(ny, nw);
  Jt_.resize(ny, nw);
  M_.resize(ny, nw);
  const Matrix& U = cost.weight_factor();
  if (U.isDiagonal(0.0)) sqrt_weight_ = U.diagonal();
  reset();
}

void CostAccumulator::reset() {
  L_ = 0.0;
  grad_.setZero();
  H_.setZero();
}

std::size_t CostAccumulator::workspace_size() const {
  return static_cast<std::size_t>(1 + sqrt_weight_.size() + grad_.size() + H_.size() + r_.size() + Ur_.size() +
                                  J_.size() + Jt_.size() + M_.size());
}

void CostAccumulator::add_point(double weight, ConstVectorRef x, ConstVectorRef u) {
  if (x.size() != nx_ || u.size() != nu_)
    throw InvalidArgument("CostAccumulator::add_point: dimension mismatch");
  cost_.residual(x, u, r_);
  cost_.jacobian(x, u, J_);
  Jt_ = J_;
  accumulate(weight);
}

void CostAccumulator::add_point(double weight, ConstVectorRef s, ConstVectorRef u,
                                ConstMatrixRef ds_dw) {
  if (s.size() != nx_ || u.size() != nu_ || ds_dw.rows() != nx_ || ds_dw.cols() != nx_ + nu_)
    throw InvalidArgument("CostAccumulator::add_point: dimension mismatch");
  cost_.residual(s, u, r_);
  cost_.jacobian(s, u, J_);
  Jt_.noalias() = J_.leftCols(nx_) * ds_dw;
  Jt_.rightCols(nu_) += J_.rightCols(nu_);
  accumulate(weight);
}

void CostAccumulator::accumulate(double weight) {
  if (sqrt_weight_.size() > 0) {
    Ur_ = sqrt_weight_.cwiseProduct(r_);
    M_.noalias() = sqrt_weight_.asDiagonal() * Jt_;
  } else {
    const auto U = cost_.weight_factor().triangularView<Eigen::Upper>();
    Ur_.noalias() = U * r_;
    M_.noalias() = U * Jt_;
  }
  L_ += 0.5 * weight * Ur_.squaredNorm();
  grad_.noalias() += weight * (M_.transpose() * Ur_);
  H_.noalias() += weight * (M_.transpose() * M_);
}

void CostAccumulator::finalize() {
  // Exact symmetry: (a + b) / 2 is commutative in floating point.
  for (Eigen::Index j = 0; j < H_.cols(); ++j)
    for (Eigen::Index i = j + 1; i < H_.rows(); ++i) {
      const double v = 0.5 * (H_(i, j) + H_(j, i));
      H_(i, j) = v;
      H_(j, i) = v;
    }
}

void GnrkCostAccumulator::on_substep(const SubstepView& view) {
  const int nx = static_cast<int>(view.stage_states.rows());
  const int ns = view.tableau.n_stages();
  for (int j = 0; j < ns; ++j) {
    acc_.add_point(view.h * view.tableau.b(j), view.stage_states.col(j), view.u,
                   view.stage_sensitivities.middleRows(j * nx, nx));
  }
}

CostTerms sn_cost_terms(const ResidualCost& cost, double dt, const Vector& x, const Vector& u) {
  if (!(dt > 0.0)) throw InvalidArgument("sn_cost_terms: dt must be positive");
  CostAccumulator acc(cost);
  acc.add_point(dt, x, u);
  acc.finalize();
  return {acc.cost(), acc.gradient(), acc.hessian()};
}

GnrkIntegrator::GnrkIntegrator(DynamicsModel model, const ResidualCost& cost,
                               IrkSettings settings)
    : irk_(std::move(model), std::move(settings)), acc_(cost) {
  if (cost.nx() != irk_.model().nx || cost.nu() != irk_.model().nu)
    throw InvalidArgument("GnrkIntegrator: cost and model dimensions differ");
}

void GnrkIntegrator::step(double t0, double dt, ConstVectorRef x0, ConstVectorRef u,
                          StepOutput& out) {
  acc_.reset();
  irk_.step(t0, dt, x0, u, &acc_);
  acc_.finalize();
  out.x_next = irk_.x_next();
  out.S = irk_.sensitivity();
  out.L = acc_.cost();
  out.grad = acc_.gradient();
  out.H = acc_.hessian();
}

StepOutput GnrkIntegrator::step(double t0, double dt, const Vector& x0, const Vector& u) {
  StepOutput out;
  step(t0, dt, x0, u, out);
  return out;
}

}  // namespace gnrk
