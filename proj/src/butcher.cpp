#include "gnrk/butcher.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "gnrk/errors.hpp"

namespace gnrk {

namespace {

using Real = long double;
using RealMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using RealVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

// Value and derivative of q(x) = P_s(x) - P_{s-1}(x) on [-1, 1].
void radau_polynomial(int s, Real x, Real& q, Real& dq) {
  Real p_prev = 1.0L;  // P_0
  Real p = x;          // P_1
  Real dp_prev = 0.0L;
  Real dp = 1.0L;
  if (s == 1) {
    q = p - p_prev;
    dq = dp - dp_prev;
    return;
  }
  for (int n = 1; n < s; ++n) {
    const Real p_next = ((2 * n + 1) * x * p - n * p_prev) / (n + 1);
    const Real dp_next = ((2 * n + 1) * (p + x * dp) - n * dp_prev) / (n + 1);
    p_prev = p;
    p = p_next;
    dp_prev = dp;
    dp = dp_next;
  }
  q = p - p_prev;
  dq = dp - dp_prev;
}

std::vector<Real> radau_nodes(int s) {
  std::vector<Real> roots;
  roots.reserve(s);
  const Real pi = std::numbers::pi_v<Real>;
  for (int j = 0; j < s; ++j) {
    // Chebyshev-like initial guess; j = 0 lands on x = 1 exactly.
    Real x = std::cos(2.0L * pi * j / (2 * s - 1));
    for (int it = 0; it < 100; ++it) {
      Real q, dq;
      radau_polynomial(s, x, q, dq);
      Real deflate = 0.0L;
      for (Real r : roots) deflate += 1.0L / (x - r);
      const Real denom = dq - q * deflate;
      if (denom == 0.0L) break;
      const Real dx = q / denom;
      x -= dx;
      if (std::fabs(dx) <= 1e-17L) break;
    }
    roots.push_back(x);
  }
  std::vector<Real> c(s);
  for (int j = 0; j < s; ++j) c[j] = (1.0L + roots[j]) / 2.0L;
  std::sort(c.begin(), c.end());
  c.back() = 1.0L;
  return c;
}

}  // namespace

ButcherTableau radau_iia(int n_stages) {
  if (n_stages < 1 || n_stages > 9) throw InvalidArgument("radau_iia: n_stages must be in [1, 9]");
  const int s = n_stages;
  const std::vector<Real> c = radau_nodes(s);

  // V(q, l) = c_l^q, rows q = 0..s-1.
  RealMatrix V(s, s);
  for (int l = 0; l < s; ++l) {
    Real pw = 1.0L;
    for (int q = 0; q < s; ++q) {
      V(q, l) = pw;
      pw *= c[l];
    }
  }
  const Eigen::FullPivLU<RealMatrix> lu(V);

  ButcherTableau tab;
  tab.A.resize(s, s);
  tab.b.resize(s);
  tab.c.resize(s);
  tab.order = 2 * s - 1;
  for (int j = 0; j < s; ++j) {
    RealVector rhs(s);
    Real pw = c[j];
    for (int q = 0; q < s; ++q) {
      rhs(q) = pw / (q + 1);
      pw *= c[j];
    }
    const RealVector row = lu.solve(rhs);
    for (int l = 0; l < s; ++l) tab.A(j, l) = static_cast<double>(row(l));
    tab.c(j) = static_cast<double>(c[j]);
  }
  tab.b = tab.A.row(s - 1).transpose();
  return tab;
}

ButcherTableau explicit_euler() {
  ButcherTableau tab;
  tab.A = Matrix::Zero(1, 1);
  tab.b = Vector::Ones(1);
  tab.c = Vector::Zero(1);
  tab.order = 1;
  return tab;
}

}  // namespace gnrk
