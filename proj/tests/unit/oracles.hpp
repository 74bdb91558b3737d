#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "gnrk/ocp.hpp"

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Central differences of a vector valued map, one column per input.
inline Mat central_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& z, double h) {
  const Vec f0 = f(z);
  Mat J(f0.size(), z.size());
  for (int j = 0; j < z.size(); ++j) {
    Vec zp = z, zm = z;
    zp(j) += h;
    zm(j) -= h;
    J.col(j) = (f(zp) - f(zm)) / (2.0 * h);
  }
  return J;
}

inline Vec central_gradient(const std::function<double(const Vec&)>& f, const Vec& z, double h) {
  Vec g(z.size());
  for (int j = 0; j < z.size(); ++j) {
    Vec zp = z, zm = z;
    zp(j) += h;
    zm(j) -= h;
    g(j) = (f(zp) - f(zm)) / (2.0 * h);
  }
  return g;
}

inline double rel_inf(const Mat& a, const Mat& ref) {
  return (a - ref).lpNorm<Eigen::Infinity>() / std::max(1.0, ref.lpNorm<Eigen::Infinity>());
}

// Dense solution of the stagewise QP, variables (dx_0, du_0, ..., dx_N).
struct DenseQpSolution {
  std::vector<Vec> dx, du, lam, z_lo, z_hi;
};

// Brute-force active-set oracle: every bounded control is free, at its lower
// or at its upper bound. Each guess is an equality-constrained KKT solve; the
// first primal/dual feasible guess is the solution (unique for H > 0).
inline std::optional<DenseQpSolution> dense_qp(const gnrk::QpData& qp, const Vec& dx0) {
  const int N = qp.N(), nx = qp.nx, nu = qp.nu, nw = nx + nu;
  const int nz = N * nw + nx;
  const int ne = (N + 1) * nx;
  Mat H = Mat::Zero(nz, nz);
  Vec g = Vec::Zero(nz);
  Mat E = Mat::Zero(ne, nz);
  Vec e = Vec::Zero(ne);
  for (int n = 0; n < N; ++n) {
    const auto& st = qp.stages[n];
    H.block(n * nw, n * nw, nw, nw) = st.H;
    g.segment(n * nw, nw) = st.g;
    // A dx_n + B du_n - dx_{n+1} = -c
    E.block((n + 1) * nx, n * nw, nx, nx) = st.A;
    E.block((n + 1) * nx, n * nw + nx, nx, nu) = st.B;
    E.block((n + 1) * nx, (n + 1) * nw, nx, nx) = -Mat::Identity(nx, nx);
    e.segment((n + 1) * nx, nx) = -st.c;
  }
  H.bottomRightCorner(nx, nx) = qp.H_N;
  g.tail(nx) = qp.g_N;
  E.block(0, 0, nx, nx) = -Mat::Identity(nx, nx);
  e.head(nx) = -dx0;

  struct Bound {
    int var, stage, idx;
    double lo, hi;
  };
  std::vector<Bound> bounds;
  for (int n = 0; n < N; ++n)
    for (int i = 0; i < nu; ++i) {
      const double lo = qp.stages[n].lb(i), hi = qp.stages[n].ub(i);
      if (std::isfinite(lo) || std::isfinite(hi)) bounds.push_back({n * nw + nx + i, n, i, lo, hi});
    }
  const int nb = static_cast<int>(bounds.size());
  long combos = 1;
  for (int k = 0; k < nb; ++k) combos *= 3;
  const double feas_tol = 1e-9;

  for (long code = 0; code < combos; ++code) {
    std::vector<int> state(nb);  // 0 free, 1 lower, 2 upper
    long c = code;
    bool valid = true;
    int na = 0;
    for (int k = 0; k < nb; ++k) {
      state[k] = static_cast<int>(c % 3);
      c /= 3;
      if (state[k] == 1 && !std::isfinite(bounds[k].lo)) valid = false;
      if (state[k] == 2 && !std::isfinite(bounds[k].hi)) valid = false;
      if (state[k] != 0) ++na;
    }
    if (!valid) continue;
    // Active bound k: +-(z_var - bound) = 0 with multiplier mu_k >= 0 entering
    // the stationarity as -mu (lower) or +mu (upper).
    const int m = nz + ne + na;
    Mat K = Mat::Zero(m, m);
    Vec rhs = Vec::Zero(m);
    K.topLeftCorner(nz, nz) = H;
    K.block(0, nz, nz, ne) = E.transpose();
    K.block(nz, 0, ne, nz) = E;
    rhs.head(nz) = -g;
    rhs.segment(nz, ne) = e;
    int r = nz + ne;
    for (int k = 0; k < nb; ++k) {
      if (state[k] == 0) continue;
      const double sgn = state[k] == 1 ? -1.0 : 1.0;
      K(bounds[k].var, r) = sgn;
      K(r, bounds[k].var) = 1.0;
      rhs(r) = state[k] == 1 ? bounds[k].lo : bounds[k].hi;
      ++r;
    }
    const Vec sol = K.fullPivLu().solve(rhs);
    if ((K * sol - rhs).lpNorm<Eigen::Infinity>() > 1e-8 * std::max(1.0, rhs.lpNorm<Eigen::Infinity>()))
      continue;
    bool ok = true;
    r = nz + ne;
    for (int k = 0; k < nb && ok; ++k) {
      const double v = sol(bounds[k].var);
      if (v < bounds[k].lo - feas_tol || v > bounds[k].hi + feas_tol) ok = false;
      if (state[k] != 0) {
        if (sol(r) < -feas_tol) ok = false;
        ++r;
      }
    }
    if (!ok) continue;

    DenseQpSolution out;
    for (int n = 0; n <= N; ++n) out.dx.push_back(sol.segment(n * nw, nx));
    for (int n = 0; n < N; ++n) {
      out.du.push_back(sol.segment(n * nw + nx, nu));
      out.z_lo.push_back(Vec::Zero(nu));
      out.z_hi.push_back(Vec::Zero(nu));
    }
    for (int n = 0; n <= N; ++n) out.lam.push_back(sol.segment(nz + n * nx, nx));
    r = nz + ne;
    for (int k = 0; k < nb; ++k) {
      if (state[k] == 0) continue;
      (state[k] == 1 ? out.z_lo : out.z_hi)[bounds[k].stage](bounds[k].idx) = sol(r);
      ++r;
    }
    return out;
  }
  return std::nullopt;
}

// Random strictly convex stagewise QP with a mix of finite and infinite bounds.
inline gnrk::QpData random_qp(std::mt19937& rng, int N, int nx, int nu) {
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  const double inf = std::numeric_limits<double>::infinity();
  auto randn = [&](int r, int c) {
    Mat M(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) M(i, j) = nd(rng);
    return M;
  };
  auto spd = [&](int n) {
    const Mat L = randn(n, n);
    return Mat(L * L.transpose() + 0.5 * Mat::Identity(n, n));
  };
  gnrk::QpData qp;
  qp.resize(N, nx, nu);
  for (int n = 0; n < N; ++n) {
    auto& st = qp.stages[n];
    st.H = spd(nx + nu);
    st.g = 5.0 * randn(nx + nu, 1);
    st.A = Mat::Identity(nx, nx) + 0.3 * randn(nx, nx);
    st.B = randn(nx, nu);
    st.c = 0.5 * randn(nx, 1);
    st.lb.resize(nu);
    st.ub.resize(nu);
    for (int i = 0; i < nu; ++i) {
      const double w = 0.2 + ud(rng);
      st.lb(i) = ud(rng) < 0.15 ? -inf : -w;
      st.ub(i) = ud(rng) < 0.15 ? inf : w;
    }
  }
  qp.H_N = spd(nx);
  qp.g_N = randn(nx, 1);
  return qp;
}

}  // namespace oracle
