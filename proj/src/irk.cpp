#include "gnrk/irk.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "gnrk/errors.hpp"

namespace gnrk {

constexpr int kMaxHalvings = 30;

void IrkSettings::validate() const {
  if (tableau.n_stages() < 1 || tableau.A.rows() != tableau.n_stages() ||
      tableau.A.cols() != tableau.n_stages() || tableau.c.size() != tableau.n_stages())
    throw InvalidArgument("IrkSettings: malformed Butcher tableau");
  if (n_steps < 1) throw InvalidArgument("IrkSettings: n_steps must be >= 1");
  if (!(newton_tol > 0.0)) throw InvalidArgument("IrkSettings: newton_tol must be positive");
  if (newton_max_iter < 1) throw InvalidArgument("IrkSettings: newton_max_iter must be >= 1");
}

IrkIntegrator::IrkIntegrator(DynamicsModel model, IrkSettings settings)
    : model_(std::move(model)), settings_(std::move(settings)) {
  settings_.validate();
  nx_ = model_.nx;
  nu_ = model_.nu;
  ns_ = settings_.tableau.n_stages();
  const int nw = nx_ + nu_;
  const int nk = ns_ * nx_;
  x_.resize(nx_);
  Xw_.resize(nx_, nw);
  K_.resize(nx_, ns_);
  residual_.resize(nk);
  delta_.resize(nk);
  stage_states_.resize(nx_, ns_);
  jac_x_.resize(nx_, nk);
  jac_xdot_.resize(nx_, nk);
  jac_u_.resize(nx_, ns_ * nu_);
  newton_matrix_.resize(nk, nk);
  lu_ = Eigen::PartialPivLU<Matrix>(nk);
  sens_rhs_.resize(nk, nw);
  dK_dw_.resize(nk, nw);
  stage_sens_.resize(nk, nw);
}

std::size_t IrkIntegrator::workspace_size() const {
  const auto sz = [](const auto& m) { return static_cast<std::size_t>(m.size()); };
  const std::size_t nk = static_cast<std::size_t>(ns_ * nx_);
  return sz(x_) + sz(Xw_) + sz(K_) + sz(residual_) + sz(delta_) + sz(stage_states_) +
         sz(jac_x_) + sz(jac_xdot_) + sz(jac_u_) + sz(newton_matrix_) + nk * nk + nk +
         sz(sens_rhs_) + sz(dK_dw_) + sz(stage_sens_);
}

void IrkIntegrator::evaluate_stages(double t, double h, ConstVectorRef u) {
  const auto& tab = settings_.tableau;
  stage_states_.noalias() = h * K_ * tab.A.transpose();
  stage_states_.colwise() += x_;
  for (int j = 0; j < ns_; ++j) {
    model_.eval(t + tab.c(j) * h, stage_states_.col(j), K_.col(j), u,
                residual_.segment(j * nx_, nx_));
  }
}

void IrkIntegrator::factorize_stage_jacobian(double t, double h, ConstVectorRef u) {
  const auto& tab = settings_.tableau;
  for (int j = 0; j < ns_; ++j) {
    model_.jacobians(t + tab.c(j) * h, stage_states_.col(j), K_.col(j), u,
                     jac_x_.middleCols(j * nx_, nx_), jac_xdot_.middleCols(j * nx_, nx_),
                     jac_u_.middleCols(j * nu_, nu_));
  }
  for (int j = 0; j < ns_; ++j) {
    for (int l = 0; l < ns_; ++l) {
      auto blk = newton_matrix_.block(j * nx_, l * nx_, nx_, nx_);
      blk.noalias() = (h * tab.A(j, l)) * jac_x_.middleCols(j * nx_, nx_);
      if (j == l) blk += jac_xdot_.middleCols(j * nx_, nx_);
    }
  }
  lu_.compute(newton_matrix_);
  ++factorizations_;
  const double rcond = lu_.rcond();
  if (!(rcond > 1e-14)) throw SingularStageJacobian("singular stage Jacobian");
}

void IrkIntegrator::step(double t0, double dt, ConstVectorRef x0, ConstVectorRef u,
                         StageObserver* observer) {
  if (!(dt > 0.0)) throw InvalidArgument("IrkIntegrator::step: dt must be positive");
  if (x0.size() != nx_ || u.size() != nu_)
    throw InvalidArgument("IrkIntegrator::step: dimension mismatch");
  ++step_count_;
  newton_iterations_ = 0;
  factorizations_ = 0;

  const auto& tab = settings_.tableau;
  const double h = dt / settings_.n_steps;
  const double tol = settings_.newton_tol;
  constexpr double eps = std::numeric_limits<double>::epsilon();

  x_ = x0;
  Xw_.setZero();
  Xw_.leftCols(nx_).setIdentity();
  K_.setZero();

  Eigen::Map<Vector> k_flat(K_.data(), K_.size());

  for (int i = 0; i < settings_.n_steps; ++i) {
    const double t = t0 + i * h;
    bool have_matrix = i > 0;
    bool converged = false;
    bool fresh = false;
    int halvings = 0;
    double prev_norm = std::numeric_limits<double>::infinity();
    for (int it = 0;; ++it) {
      evaluate_stages(t, h, u);
      const double norm = residual_.lpNorm<Eigen::Infinity>();
      if (norm <= tol) {
        converged = true;
        break;
      }
      // A step along a freshly factorized Jacobian that increases the
      // residual is halved.
      if (fresh && !(norm < prev_norm) && halvings < kMaxHalvings) {
        delta_ *= 0.5;
        k_flat += delta_;
        ++halvings;
        continue;
      }
      if (!std::isfinite(norm)) break;
      if (it >= settings_.newton_max_iter + halvings) break;
      fresh = !have_matrix || norm > 0.1 * prev_norm;
      if (fresh) {
        factorize_stage_jacobian(t, h, u);
        have_matrix = true;
      }
      delta_.noalias() = lu_.solve(residual_);
      k_flat -= delta_;
      ++newton_iterations_;
      prev_norm = norm;
      // Step at the rounding floor: the residual cannot be reduced further.
      if (delta_.lpNorm<Eigen::Infinity>() <= 8.0 * eps * (1.0 + k_flat.lpNorm<Eigen::Infinity>()) &&
          norm <= 100.0 * tol) {
        evaluate_stages(t, h, u);
        converged = true;
        break;
      }
    }
    if (!converged) {
      throw NewtonNonConvergence("IRK stage equations did not converge (substep " +
                                 std::to_string(i) + ", residual " +
                                 std::to_string(residual_.lpNorm<Eigen::Infinity>()) + ")");
    }

    // Sensitivities at the converged stages.
    factorize_stage_jacobian(t, h, u);
    for (int j = 0; j < ns_; ++j) {
      auto rhs = sens_rhs_.middleRows(j * nx_, nx_);
      rhs.noalias() = jac_x_.middleCols(j * nx_, nx_) * Xw_;
      rhs.rightCols(nu_) += jac_u_.middleCols(j * nu_, nu_);
    }
    dK_dw_.noalias() = lu_.solve(sens_rhs_);
    dK_dw_ = -dK_dw_;
    for (int j = 0; j < ns_; ++j) {
      auto blk = stage_sens_.middleRows(j * nx_, nx_);
      blk = Xw_;
      for (int l = 0; l < ns_; ++l) blk += (h * tab.A(j, l)) * dK_dw_.middleRows(l * nx_, nx_);
    }

    if (observer != nullptr) {
      const SubstepView view{i, t, h, tab, u, stage_states_, stage_sens_};
      observer->on_substep(view);
    }

    x_.noalias() += h * (K_ * tab.b);
    for (int j = 0; j < ns_; ++j) Xw_ += (h * tab.b(j)) * dK_dw_.middleRows(j * nx_, nx_);
  }
}

namespace {

class Recorder : public StageObserver {
 public:
  explicit Recorder(std::vector<RecordedSubstep>& out) : out_(out) {}
  void on_substep(const SubstepView& v) override {
    out_.push_back({v.t, v.h, v.stage_states, v.stage_sensitivities});
  }

 private:
  std::vector<RecordedSubstep>& out_;
};

}  // namespace

IrkStepResult irk_step_with_sens(const DynamicsModel& model, const IrkSettings& settings,
                                 double t0, double dt, const Vector& x0, const Vector& u) {
  IrkIntegrator integrator(model, settings);
  IrkStepResult result;
  Recorder recorder(result.substeps);
  integrator.step(t0, dt, x0, u, &recorder);
  result.x_next = integrator.x_next();
  result.S = integrator.sensitivity();
  return result;
}

}  // namespace gnrk
