#include "gnrk/ocp.hpp"

#include <cmath>
#include <string>

#include "gnrk/errors.hpp"

namespace gnrk {

Grid make_grid_uniform(double T, int N) {
  if (!(T > 0.0) || N < 1) throw InvalidArgument("make_grid_uniform: need T > 0 and N >= 1");
  Grid grid;
  grid.t.resize(N + 1);
  const double dt = T / N;
  for (int n = 0; n < N; ++n) grid.t[n] = n * dt;
  grid.t[N] = T;
  return grid;
}

Grid make_grid_nonuniform(double T, int N, double Ts) {
  if (N < 2) throw InvalidArgument("make_grid_nonuniform: need N >= 2");
  if (!(Ts > 0.0) || !(Ts < T)) throw InvalidArgument("make_grid_nonuniform: need 0 < Ts < T");
  Grid grid;
  grid.t.resize(N + 1);
  const double dt = (T - Ts) / (N - 1);
  grid.t[0] = 0.0;
  for (int n = 1; n < N; ++n) grid.t[n] = Ts + (n - 1) * dt;
  grid.t[N] = T;
  return grid;
}

void OcpFormulation::validate() const {
  const int nx = model.nx;
  const int nu = model.nu;
  if (cost.nx() != nx || cost.nu() != nu)
    throw InvalidArgument("OcpFormulation: cost and model dimensions differ");
  if (grid.N() < 1) throw InvalidArgument("OcpFormulation: grid needs at least one interval");
  if (grid.t.front() != 0.0) throw InvalidArgument("OcpFormulation: grid must start at 0");
  for (int n = 0; n < grid.N(); ++n)
    if (!(grid.dt(n) > 0.0)) throw InvalidArgument("OcpFormulation: grid not strictly increasing");
  if (u_lo.size() != nu || u_hi.size() != nu)
    throw InvalidArgument("OcpFormulation: bound dimensions");
  if ((u_lo.array() > u_hi.array()).any()) throw InvalidArgument("OcpFormulation: u_lo > u_hi");
  if (P.rows() != nx || P.cols() != nx) throw InvalidArgument("OcpFormulation: P must be nx x nx");
  const double scale = std::max(1.0, P.cwiseAbs().maxCoeff());
  if ((P - P.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw InvalidArgument("OcpFormulation: P not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(P, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10 * scale)
    throw InvalidArgument("OcpFormulation: P not positive semidefinite");
  irk.validate();
}

NlpIterate NlpIterate::replicate(const OcpFormulation& ocp, const Vector& x0) {
  const int N = ocp.N();
  NlpIterate it;
  it.x.assign(N + 1, x0);
  it.u.assign(N, Vector::Zero(ocp.nu()));
  it.lam.assign(N + 1, Vector::Zero(ocp.nx()));
  it.z_lo.assign(N, Vector::Zero(ocp.nu()));
  it.z_hi.assign(N, Vector::Zero(ocp.nu()));
  return it;
}

bool NlpIterate::all_finite() const {
  const auto finite = [](const std::vector<Vector>& vs) {
    for (const auto& v : vs)
      if (!v.allFinite()) return false;
    return true;
  };
  return finite(x) && finite(u) && finite(lam) && finite(z_lo) && finite(z_hi);
}

void QpData::resize(int N, int nx_, int nu_) {
  nx = nx_;
  nu = nu_;
  stages.resize(N);
  for (auto& st : stages) {
    st.H.resize(nx + nu, nx + nu);
    st.g.resize(nx + nu);
    st.A.resize(nx, nx);
    st.B.resize(nx, nu);
    st.c.resize(nx);
    st.lb.resize(nu);
    st.ub.resize(nu);
  }
  H_N.resize(nx, nx);
  g_N.resize(nx);
}

Linearizer::Linearizer(OcpFormulation ocp)
    : ocp_((ocp.validate(), std::move(ocp))),
      irk_(ocp_.model, ocp_.irk),
      gnrk_(ocp_.cost),
      sn_(ocp_.cost) {}

void Linearizer::linearize(const NlpIterate& iterate, QpData& qp) {
  const int N = ocp_.N();
  const int nx = ocp_.nx();
  const int nu = ocp_.nu();
  if (static_cast<int>(iterate.x.size()) != N + 1 || static_cast<int>(iterate.u.size()) != N)
    throw InvalidArgument("Linearizer: iterate does not match the grid");
  if (qp.N() != N || qp.nx != nx || qp.nu != nu) qp.resize(N, nx, nu);

  double objective = 0.0;
  for (int n = 0; n < N; ++n) {
    const Vector& x = iterate.x[n];
    const Vector& u = iterate.u[n];
    QpStage& st = qp.stages[n];
    const double t0 = ocp_.grid.t[n];
    const double dt = ocp_.grid.dt(n);
    try {
      if (ocp_.cost_discretization == CostDiscretization::GNRK) {
        gnrk_.reset();
        irk_.step(t0, dt, x, u, &gnrk_);
        gnrk_.finalize();
        st.H = gnrk_.hessian();
        st.g = gnrk_.gradient();
        objective += gnrk_.cost();
      } else {
        irk_.step(t0, dt, x, u);
        sn_.reset();
        sn_.add_point(dt, x, u);
        sn_.finalize();
        st.H = sn_.hessian();
        st.g = sn_.gradient();
        objective += sn_.cost();
      }
    } catch (IntegratorError& e) {
      e.set_stage(n);
      throw;
    }
    const Matrix& S = irk_.sensitivity();
    st.A = S.leftCols(nx);
    st.B = S.rightCols(nu);
    st.c = irk_.x_next() - iterate.x[n + 1];
    st.lb = ocp_.u_lo - u;
    st.ub = ocp_.u_hi - u;
  }
  const Vector& xN = iterate.x[N];
  qp.H_N = 2.0 * ocp_.P;
  qp.g_N.noalias() = 2.0 * ocp_.P * xN;
  objective += xN.dot(ocp_.P * xN);
  qp.objective = objective;
}

QpData linearize(const OcpFormulation& ocp, const NlpIterate& iterate) {
  Linearizer lin(ocp);
  QpData qp;
  lin.linearize(iterate, qp);
  return qp;
}

}  // namespace gnrk
