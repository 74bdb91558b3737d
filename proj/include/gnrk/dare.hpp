#pragma once

#include "gnrk/irk.hpp"
#include "gnrk/types.hpp"

namespace gnrk {

struct DareOptions {
  int max_iter = 100000;
  double tol = 1e-10;
};

/// Solves P = A'PA - A'PB (R + B'PB)^{-1} B'PA + Q by iterating the Riccati
/// map from P = Q until the Frobenius-norm fixed-point residual is <= tol.
/// Throws DareNonConvergence (typically a non-stabilizable pair).
Matrix solve_dare(const Matrix& A, const Matrix& B, const Matrix& Q, const Matrix& R,
                  const DareOptions& options = {});

/// Frobenius norm of Riccati(P) - P.
double dare_residual(const Matrix& A, const Matrix& B, const Matrix& Q, const Matrix& R,
                     const Matrix& P);

struct DiscreteLinearization {
  Matrix A;
  Matrix B;
};

/// (A, B) = d phi / d(x, u) at (x_ss, u_ss) for one integrator step of length Ts.
DiscreteLinearization discretize_linearization(const DynamicsModel& model,
                                               const IrkSettings& settings, double Ts,
                                               const Vector& x_ss, const Vector& u_ss);

/// Terminal weight P for M(x) = x'Px: DARE with (A, B) from
/// discretize_linearization and stage weights Qd = Q Ts, Rd = R Ts.
Matrix riccati_terminal_weight(const DynamicsModel& model, const IrkSettings& settings,
                               double Ts, const Vector& x_ss, const Vector& u_ss,
                               const Matrix& Q, const Matrix& R);

}  // namespace gnrk
