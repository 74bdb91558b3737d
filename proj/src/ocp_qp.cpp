#include "gnrk/ocp_qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gnrk/errors.hpp"

namespace gnrk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRegularization = 1e-9;
constexpr double kFractionToBoundary = 0.995;

double inf_norm(const std::vector<Vector>& vs) {
  double m = 0.0;
  for (const auto& v : vs)
    if (v.size() > 0) m = std::max(m, v.lpNorm<Eigen::Infinity>());
  return m;
}

// Size of the multiplier terms entering stationarity.
double multiplier_scale(const QpData& qp, const std::vector<Vector>& lam,
                        const std::vector<Vector>& z_lo, const std::vector<Vector>& z_hi) {
  double m = 0.0;
  for (int n = 0; n < qp.N(); ++n) {
    const QpStage& st = qp.stages[n];
    const double coupling = std::max({1.0, st.A.lpNorm<Eigen::Infinity>(), st.B.lpNorm<Eigen::Infinity>()});
    m = std::max({m, coupling * lam[n + 1].lpNorm<Eigen::Infinity>(), lam[n].lpNorm<Eigen::Infinity>(),
                  z_lo[n].lpNorm<Eigen::Infinity>(), z_hi[n].lpNorm<Eigen::Infinity>()});
  }
  return m;
}

}  // namespace

double KktResiduals::max() const {
  return std::max({stationarity, equality, bounds, complementarity});
}

double KktResiduals::scaled() const {
  return std::max({stationarity / scales.dual, equality / scales.primal, bounds / scales.primal,
                   complementarity / scales.dual});
}

KktScales qp_kkt_scales(const QpData& qp, ConstVectorRef dx0_fix) {
  KktScales s;
  const auto bound_norm = [](const Vector& v) {
    double m = 0.0;
    for (int i = 0; i < v.size(); ++i)
      if (std::isfinite(v(i))) m = std::max(m, std::abs(v(i)));
    return m;
  };
  s.dual = std::max({1.0, qp.H_N.lpNorm<Eigen::Infinity>(), qp.g_N.lpNorm<Eigen::Infinity>()});
  s.primal = std::max(1.0, dx0_fix.lpNorm<Eigen::Infinity>());
  for (const QpStage& st : qp.stages) {
    s.dual = std::max({s.dual, st.H.lpNorm<Eigen::Infinity>(), st.g.lpNorm<Eigen::Infinity>()});
    s.primal = std::max({s.primal, st.c.lpNorm<Eigen::Infinity>(), bound_norm(st.lb), bound_norm(st.ub)});
  }
  return s;
}

KktResiduals qp_kkt_residuals(const QpData& qp, ConstVectorRef dx0_fix, const QpSolution& sol) {
  const int N = qp.N();
  const int nx = qp.nx;
  const int nu = qp.nu;
  KktResiduals res;
  for (int n = 0; n < N; ++n) {
    const QpStage& st = qp.stages[n];
    Vector w(nx + nu);
    w << sol.dx[n], sol.du[n];
    Vector grad = st.H * w + st.g;
    grad.head(nx) += st.A.transpose() * sol.lam[n + 1] - sol.lam[n];
    grad.tail(nu) += st.B.transpose() * sol.lam[n + 1] - sol.z_lo[n] + sol.z_hi[n];
    res.stationarity = std::max(res.stationarity, grad.lpNorm<Eigen::Infinity>());

    const Vector dyn = st.A * sol.dx[n] + st.B * sol.du[n] + st.c - sol.dx[n + 1];
    res.equality = std::max(res.equality, dyn.lpNorm<Eigen::Infinity>());

    for (int i = 0; i < nu; ++i) {
      const double u = sol.du[n](i);
      if (std::isfinite(st.lb(i))) {
        res.bounds = std::max(res.bounds, st.lb(i) - u);
        res.complementarity = std::max(res.complementarity, std::abs(sol.z_lo[n](i) * (u - st.lb(i))));
      }
      if (std::isfinite(st.ub(i))) {
        res.bounds = std::max(res.bounds, u - st.ub(i));
        res.complementarity = std::max(res.complementarity, std::abs(sol.z_hi[n](i) * (st.ub(i) - u)));
      }
      res.complementarity = std::max({res.complementarity, -sol.z_lo[n](i), -sol.z_hi[n](i)});
    }
  }
  res.scales = qp_kkt_scales(qp, dx0_fix);
  res.scales.dual = std::max(res.scales.dual, multiplier_scale(qp, sol.lam, sol.z_lo, sol.z_hi));
  const Vector gN = qp.H_N * sol.dx[N] + qp.g_N - sol.lam[N];
  res.stationarity = std::max(res.stationarity, gN.lpNorm<Eigen::Infinity>());
  res.equality = std::max(res.equality, (sol.dx[0] - dx0_fix).lpNorm<Eigen::Infinity>());
  return res;
}

void OcpQpSolver::resize(const QpData& qp) {
  if (N_ == qp.N() && nx_ == qp.nx && nu_ == qp.nu) return;
  N_ = qp.N();
  nx_ = qp.nx;
  nu_ = qp.nu;
  const auto N = static_cast<std::size_t>(N_);
  const auto make = [](std::vector<Vector>& v, std::size_t count, int size) {
    v.assign(count, Vector::Zero(size));
  };
  make(dx_, N + 1, nx_);
  make(du_, N, nu_);
  make(lam_, N + 1, nx_);
  for (auto* v : {&t_lo_, &t_hi_, &z_lo_, &z_hi_, &r_u_, &r_lo_, &r_hi_, &d_u_, &d_tlo_, &d_thi_,
                  &d_zlo_, &d_zhi_, &a_tlo_, &a_thi_, &a_zlo_, &a_zhi_, &k_, &q_u_, &sigma_})
    make(*v, N, nu_);
  make(r_x_, N, nx_);
  make(r_dyn_, N, nx_);
  make(d_x_, N + 1, nx_);
  make(d_lam_, N + 1, nx_);
  make(p_, N + 1, nx_);
  has_lo_.assign(N, Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(nu_, false));
  has_hi_.assign(N, Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(nu_, false));
  P_.assign(N + 1, Matrix::Zero(nx_, nx_));
  K_.assign(N, Matrix::Zero(nu_, nx_));
  Sb_.assign(N, Matrix::Zero(nu_, nx_));
  Rb_.assign(N, Eigen::LLT<Matrix>(nu_));
  r_N_.resize(nx_);
  r_0_.resize(nx_);
}

void OcpQpSolver::factorize(const QpData& qp) {
  P_[N_] = qp.H_N;
  for (int n = N_ - 1; n >= 0; --n) {
    const QpStage& st = qp.stages[n];
    const Matrix& P = P_[n + 1];
    const Matrix PB = P * st.B;
    const Matrix PA = P * st.A;
    Matrix Rb = st.H.bottomRightCorner(nu_, nu_) + st.B.transpose() * PB;
    Rb.diagonal() += sigma_[n];
    Sb_[n] = st.H.bottomLeftCorner(nu_, nx_) + st.B.transpose() * PA;
    Rb_[n].compute(Rb);
    if (Rb_[n].info() != Eigen::Success) {
      Rb.diagonal().array() += kRegularization;
      Rb_[n].compute(Rb);
      if (Rb_[n].info() != Eigen::Success)
        throw NonConvexBlock("stage " + std::to_string(n) +
                             ": control Hessian block not positive definite");
    }
    K_[n] = -Rb_[n].solve(Sb_[n]);
    Matrix Pn = st.H.topLeftCorner(nx_, nx_) + st.A.transpose() * PA + Sb_[n].transpose() * K_[n];
    P_[n] = 0.5 * (Pn + Pn.transpose());
  }
}

void OcpQpSolver::solve_newton(const QpData& qp, bool corrector, double sigma_mu) {
  // Complementarity right-hand sides folded into the control gradient.
  for (int n = 0; n < N_; ++n) {
    q_u_[n] = r_u_[n];
    for (int i = 0; i < nu_; ++i) {
      if (has_lo_[n](i)) {
        double rc = t_lo_[n](i) * z_lo_[n](i);
        if (corrector) rc += a_tlo_[n](i) * a_zlo_[n](i) - sigma_mu;
        q_u_[n](i) += (rc + z_lo_[n](i) * r_lo_[n](i)) / t_lo_[n](i);
      }
      if (has_hi_[n](i)) {
        double rc = t_hi_[n](i) * z_hi_[n](i);
        if (corrector) rc += a_thi_[n](i) * a_zhi_[n](i) - sigma_mu;
        q_u_[n](i) -= (rc + z_hi_[n](i) * r_hi_[n](i)) / t_hi_[n](i);
      }
    }
  }

  p_[N_] = r_N_;
  for (int n = N_ - 1; n >= 0; --n) {
    const QpStage& st = qp.stages[n];
    const Vector pb = P_[n + 1] * r_dyn_[n] + p_[n + 1];
    k_[n] = -Rb_[n].solve(q_u_[n] + st.B.transpose() * pb);
    p_[n] = r_x_[n] + st.A.transpose() * pb + Sb_[n].transpose() * k_[n];
  }

  d_x_[0] = r_0_;
  for (int n = 0; n < N_; ++n) {
    const QpStage& st = qp.stages[n];
    d_u_[n] = K_[n] * d_x_[n] + k_[n];
    d_x_[n + 1] = st.A * d_x_[n] + st.B * d_u_[n] + r_dyn_[n];
    d_lam_[n] = P_[n] * d_x_[n] + p_[n];
  }
  d_lam_[N_] = P_[N_] * d_x_[N_] + p_[N_];

  for (int n = 0; n < N_; ++n) {
    for (int i = 0; i < nu_; ++i) {
      if (has_lo_[n](i)) {
        double rc = t_lo_[n](i) * z_lo_[n](i);
        if (corrector) rc += a_tlo_[n](i) * a_zlo_[n](i) - sigma_mu;
        d_tlo_[n](i) = d_u_[n](i) + r_lo_[n](i);
        d_zlo_[n](i) = (-rc - z_lo_[n](i) * d_tlo_[n](i)) / t_lo_[n](i);
      } else {
        d_tlo_[n](i) = 0.0;
        d_zlo_[n](i) = 0.0;
      }
      if (has_hi_[n](i)) {
        double rc = t_hi_[n](i) * z_hi_[n](i);
        if (corrector) rc += a_thi_[n](i) * a_zhi_[n](i) - sigma_mu;
        d_thi_[n](i) = -d_u_[n](i) + r_hi_[n](i);
        d_zhi_[n](i) = (-rc - z_hi_[n](i) * d_thi_[n](i)) / t_hi_[n](i);
      } else {
        d_thi_[n](i) = 0.0;
        d_zhi_[n](i) = 0.0;
      }
    }
  }
}

double OcpQpSolver::max_step() const {
  double alpha = kInf;
  const auto limit = [&alpha](double v, double dv) {
    if (dv < 0.0) alpha = std::min(alpha, -v / dv);
  };
  for (int n = 0; n < N_; ++n) {
    for (int i = 0; i < nu_; ++i) {
      if (has_lo_[n](i)) {
        limit(t_lo_[n](i), d_tlo_[n](i));
        limit(z_lo_[n](i), d_zlo_[n](i));
      }
      if (has_hi_[n](i)) {
        limit(t_hi_[n](i), d_thi_[n](i));
        limit(z_hi_[n](i), d_zhi_[n](i));
      }
    }
  }
  return alpha;
}

void OcpQpSolver::compute_residuals(const QpData& qp, ConstVectorRef dx0_fix) {
  for (int n = 0; n < N_; ++n) {
    const QpStage& st = qp.stages[n];
    r_x_[n] = st.H.topLeftCorner(nx_, nx_) * dx_[n] + st.H.topRightCorner(nx_, nu_) * du_[n] +
              st.g.head(nx_) + st.A.transpose() * lam_[n + 1] - lam_[n];
    r_u_[n] = st.H.bottomLeftCorner(nu_, nx_) * dx_[n] + st.H.bottomRightCorner(nu_, nu_) * du_[n] +
              st.g.tail(nu_) + st.B.transpose() * lam_[n + 1] - z_lo_[n] + z_hi_[n];
    r_dyn_[n] = st.A * dx_[n] + st.B * du_[n] + st.c - dx_[n + 1];
    for (int i = 0; i < nu_; ++i) {
      r_lo_[n](i) = has_lo_[n](i) ? du_[n](i) - st.lb(i) - t_lo_[n](i) : 0.0;
      r_hi_[n](i) = has_hi_[n](i) ? st.ub(i) - du_[n](i) - t_hi_[n](i) : 0.0;
    }
  }
  r_N_ = qp.H_N * dx_[N_] + qp.g_N - lam_[N_];
  r_0_ = dx0_fix - dx_[0];
}

void OcpQpSolver::update_sigma() {
  for (int n = 0; n < N_; ++n) {
    sigma_[n].setZero();
    for (int i = 0; i < nu_; ++i) {
      if (has_lo_[n](i)) sigma_[n](i) += z_lo_[n](i) / t_lo_[n](i);
      if (has_hi_[n](i)) sigma_[n](i) += z_hi_[n](i) / t_hi_[n](i);
    }
  }
}

void OcpQpSolver::initialize(const QpData& qp, ConstVectorRef dx0_fix) {
  // Unit slacks and multipliers at the zero point; one Newton step then
  // solves the bound-regularized equality QP. Slacks and multipliers are
  // taken from its solution and shifted into the positive orthant.
  for (int n = 0; n < N_; ++n) {
    dx_[n].setZero();
    du_[n].setZero();
    lam_[n].setZero();
    t_lo_[n].setOnes();
    t_hi_[n].setOnes();
    for (int i = 0; i < nu_; ++i) {
      z_lo_[n](i) = has_lo_[n](i) ? 1.0 : 0.0;
      z_hi_[n](i) = has_hi_[n](i) ? 1.0 : 0.0;
    }
  }
  dx_[N_].setZero();
  lam_[N_].setZero();
  if (n_bounds_ == 0) return;

  compute_residuals(qp, dx0_fix);
  update_sigma();
  factorize(qp);
  solve_newton(qp, false, 0.0);
  for (int n = 0; n <= N_; ++n) {
    dx_[n] = d_x_[n];
    lam_[n] = d_lam_[n];
  }
  double min_t = kInf;
  double max_t = -kInf;
  for (int n = 0; n < N_; ++n) {
    du_[n] = d_u_[n];
    for (int i = 0; i < nu_; ++i) {
      if (has_lo_[n](i)) {
        t_lo_[n](i) = du_[n](i) - qp.stages[n].lb(i);
        min_t = std::min(min_t, t_lo_[n](i));
        max_t = std::max(max_t, t_lo_[n](i));
      }
      if (has_hi_[n](i)) {
        t_hi_[n](i) = qp.stages[n].ub(i) - du_[n](i);
        min_t = std::min(min_t, t_hi_[n](i));
        max_t = std::max(max_t, t_hi_[n](i));
      }
    }
  }
  // Multipliers mirror the slacks, z = -t, before shifting.
  const double shift_t = min_t > 0.0 ? 0.0 : 1.0 - min_t;
  const double shift_z = max_t < 0.0 ? 0.0 : 1.0 + max_t;
  for (int n = 0; n < N_; ++n) {
    for (int i = 0; i < nu_; ++i) {
      if (has_lo_[n](i)) {
        z_lo_[n](i) = -t_lo_[n](i) + shift_z;
        t_lo_[n](i) += shift_t;
      }
      if (has_hi_[n](i)) {
        z_hi_[n](i) = -t_hi_[n](i) + shift_z;
        t_hi_[n](i) += shift_t;
      }
    }
  }
}

void OcpQpSolver::solve(const QpData& qp, ConstVectorRef dx0_fix, const QpOptions& options,
                        QpSolution& sol) {
  if (qp.N() < 1) throw InvalidArgument("solve_qp: empty QP");
  if (dx0_fix.size() != qp.nx) throw InvalidArgument("solve_qp: dx0 dimension mismatch");
  if (!(options.tol > 0.0)) throw InvalidArgument("solve_qp: tol must be positive");
  resize(qp);

  n_bounds_ = 0;
  for (int n = 0; n < N_; ++n) {
    const QpStage& st = qp.stages[n];
    for (int i = 0; i < nu_; ++i) {
      has_lo_[n](i) = std::isfinite(st.lb(i));
      has_hi_[n](i) = std::isfinite(st.ub(i));
      n_bounds_ += static_cast<int>(has_lo_[n](i)) + static_cast<int>(has_hi_[n](i));
    }
  }
  const KktScales scales = qp_kkt_scales(qp, dx0_fix);
  initialize(qp, dx0_fix);

  sol.dx.resize(N_ + 1);
  sol.du.resize(N_);
  sol.lam.resize(N_ + 1);
  sol.z_lo.resize(N_);
  sol.z_hi.resize(N_);

  for (int iter = 0;; ++iter) {
    compute_residuals(qp, dx0_fix);

    double mu = 0.0;
    double comp = 0.0;
    for (int n = 0; n < N_; ++n) {
      for (int i = 0; i < nu_; ++i) {
        if (has_lo_[n](i)) {
          mu += t_lo_[n](i) * z_lo_[n](i);
          comp = std::max(comp, t_lo_[n](i) * z_lo_[n](i));
        }
        if (has_hi_[n](i)) {
          mu += t_hi_[n](i) * z_hi_[n](i);
          comp = std::max(comp, t_hi_[n](i) * z_hi_[n](i));
        }
      }
    }
    if (n_bounds_ > 0) mu /= n_bounds_;

    const double dual = std::max({inf_norm(r_x_), inf_norm(r_u_), r_N_.lpNorm<Eigen::Infinity>()});
    const double primal = std::max({inf_norm(r_dyn_), r_0_.lpNorm<Eigen::Infinity>(),
                                    inf_norm(r_lo_), inf_norm(r_hi_)});
    const double dual_scale = std::max(scales.dual, multiplier_scale(qp, lam_, z_lo_, z_hi_));
    const double internal = std::max({dual / dual_scale, primal / scales.primal, comp / dual_scale});
    if (internal <= options.tol) {
      for (int n = 0; n <= N_; ++n) {
        sol.dx[n] = dx_[n];
        sol.lam[n] = lam_[n];
      }
      for (int n = 0; n < N_; ++n) {
        sol.du[n] = du_[n];
        sol.z_lo[n] = z_lo_[n];
        sol.z_hi[n] = z_hi_[n];
        // Inactive bounds carry exactly zero multipliers.
        for (int i = 0; i < nu_; ++i) {
          if (t_lo_[n](i) > z_lo_[n](i)) sol.z_lo[n](i) = 0.0;
          if (t_hi_[n](i) > z_hi_[n](i)) sol.z_hi[n](i) = 0.0;
        }
      }
      sol.iterations = iter;
      sol.kkt_residual = qp_kkt_residuals(qp, dx0_fix, sol).scaled();
      if (sol.kkt_residual <= options.tol) return;
      for (int n = 0; n < N_; ++n) {
        sol.z_lo[n] = z_lo_[n];
        sol.z_hi[n] = z_hi_[n];
      }
      sol.kkt_residual = qp_kkt_residuals(qp, dx0_fix, sol).scaled();
      if (sol.kkt_residual <= options.tol) return;
    }
    if (iter >= options.max_iter)
      throw QpMaxIterations("solve_qp: no convergence within " + std::to_string(options.max_iter) +
                            " iterations (scaled residual " + std::to_string(internal) + ")");

    update_sigma();
    factorize(qp);

    double alpha = 1.0;
    if (n_bounds_ > 0) {
      solve_newton(qp, false, 0.0);
      const double alpha_aff = std::min(1.0, max_step());
      double mu_aff = 0.0;
      for (int n = 0; n < N_; ++n) {
        for (int i = 0; i < nu_; ++i) {
          if (has_lo_[n](i))
            mu_aff += (t_lo_[n](i) + alpha_aff * d_tlo_[n](i)) * (z_lo_[n](i) + alpha_aff * d_zlo_[n](i));
          if (has_hi_[n](i))
            mu_aff += (t_hi_[n](i) + alpha_aff * d_thi_[n](i)) * (z_hi_[n](i) + alpha_aff * d_zhi_[n](i));
        }
      }
      mu_aff /= n_bounds_;
      const double sigma = mu > 0.0 ? std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3) : 0.0;
      for (int n = 0; n < N_; ++n) {
        a_tlo_[n] = d_tlo_[n];
        a_thi_[n] = d_thi_[n];
        a_zlo_[n] = d_zlo_[n];
        a_zhi_[n] = d_zhi_[n];
      }
      solve_newton(qp, true, sigma * mu);
      alpha = std::min(1.0, kFractionToBoundary * max_step());
    } else {
      solve_newton(qp, false, 0.0);
    }

    for (int n = 0; n <= N_; ++n) {
      dx_[n] += alpha * d_x_[n];
      lam_[n] += alpha * d_lam_[n];
    }
    for (int n = 0; n < N_; ++n) {
      du_[n] += alpha * d_u_[n];
      t_lo_[n] += alpha * d_tlo_[n];
      t_hi_[n] += alpha * d_thi_[n];
      z_lo_[n] += alpha * d_zlo_[n];
      z_hi_[n] += alpha * d_zhi_[n];
    }
  }
}

QpSolution solve_qp(const QpData& qp, const Vector& dx0_fix, double tol) {
  OcpQpSolver solver;
  QpSolution sol;
  QpOptions options;
  options.tol = tol;
  solver.solve(qp, dx0_fix, options, sol);
  return sol;
}

}  // namespace gnrk
