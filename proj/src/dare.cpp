#include "gnrk/dare.hpp"

#include "gnrk/errors.hpp"

namespace gnrk {

namespace {

Matrix riccati_map(const Matrix& A, const Matrix& B, const Matrix& Q, const Matrix& R,
                   const Matrix& P) {
  const Matrix PA = P * A;
  const Matrix BtPA = B.transpose() * PA;
  const Matrix S = R + B.transpose() * P * B;
  Matrix next = Q + A.transpose() * PA - BtPA.transpose() * S.ldlt().solve(BtPA);
  return 0.5 * (next + next.transpose());
}

}  // namespace

double dare_residual(const Matrix& A, const Matrix& B, const Matrix& Q, const Matrix& R,
                     const Matrix& P) {
  return (riccati_map(A, B, Q, R, P) - P).norm();
}

Matrix solve_dare(const Matrix& A, const Matrix& B, const Matrix& Q, const Matrix& R,
                  const DareOptions& options) {
  const auto n = A.rows();
  if (A.cols() != n || B.rows() != n || Q.rows() != n || Q.cols() != n ||
      R.rows() != B.cols() || R.cols() != B.cols())
    throw InvalidArgument("solve_dare: inconsistent shapes");
  if (R.llt().info() != Eigen::Success) throw InvalidArgument("solve_dare: R must be positive definite");

  Matrix P = Q;
  for (int it = 0; it < options.max_iter; ++it) {
    Matrix next = riccati_map(A, B, Q, R, P);
    if (!next.allFinite()) break;
    const double change = (next - P).norm();
    P = std::move(next);
    if (change <= options.tol && dare_residual(A, B, Q, R, P) <= options.tol) return P;
  }
  throw DareNonConvergence("solve_dare: Riccati iteration did not converge");
}

DiscreteLinearization discretize_linearization(const DynamicsModel& model,
                                               const IrkSettings& settings, double Ts,
                                               const Vector& x_ss, const Vector& u_ss) {
  IrkIntegrator integrator(model, settings);
  integrator.step(0.0, Ts, x_ss, u_ss);
  const Matrix& S = integrator.sensitivity();
  return {S.leftCols(model.nx), S.rightCols(model.nu)};
}

Matrix riccati_terminal_weight(const DynamicsModel& model, const IrkSettings& settings,
                               double Ts, const Vector& x_ss, const Vector& u_ss,
                               const Matrix& Q, const Matrix& R) {
  const DiscreteLinearization lin = discretize_linearization(model, settings, Ts, x_ss, u_ss);
  return solve_dare(lin.A, lin.B, Q * Ts, R * Ts);
}

}  // namespace gnrk
