#pragma once

#include "gnrk/types.hpp"

namespace gnrk {

/// Coefficients (A, b, c) of an s-stage Runge-Kutta scheme.
struct ButcherTableau {
  Matrix A;
  Vector b;
  Vector c;
  int order = 0;

  int n_stages() const { return static_cast<int>(b.size()); }
  bool nonnegative_weights() const { return (b.array() >= 0.0).all(); }
};

/// s-stage Radau IIA collocation scheme (order 2s - 1), 1 <= s <= 9.
///
/// Nodes are the roots of P_s(2c - 1) - P_{s-1}(2c - 1) (so c_s = 1), found by
/// Newton with deflation in extended precision; A follows from the collocation
/// conditions sum_l a_jl c_l^(q-1) = c_j^q / q and b is the last row of A.
ButcherTableau radau_iia(int n_stages);

/// Forward Euler: A = [[0]], b = [1], c = [0].
ButcherTableau explicit_euler();

}  // namespace gnrk
