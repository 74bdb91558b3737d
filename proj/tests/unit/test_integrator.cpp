#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>

#include "gnrk/butcher.hpp"
#include "gnrk/errors.hpp"
#include "gnrk/irk.hpp"
#include "gnrk/pendulum.hpp"
#include "oracles.hpp"

using namespace gnrk;

namespace {

DynamicsModel decay_model(double lambda) {
  return make_lti_model(Matrix::Constant(1, 1, lambda), Matrix::Zero(1, 1));
}

double integrate_decay(int s, int n_steps) {
  IrkSettings st;
  st.tableau = radau_iia(s);
  st.n_steps = n_steps;
  IrkIntegrator irk(decay_model(-1.0), st);
  irk.step(0.0, 1.0, Vector::Ones(1), Vector::Zero(1));
  return irk.x_next()(0);
}

// Radau IIA stability functions are the (s-1, s) Pade approximants of exp.
double radau_stability(int s, double z) {
  switch (s) {
    case 1: return 1.0 / (1.0 - z);
    case 2: return (1.0 + z / 3.0) / (1.0 - 2.0 * z / 3.0 + z * z / 6.0);
    case 3:
      return (1.0 + 2.0 * z / 5.0 + z * z / 20.0) /
             (1.0 - 3.0 * z / 5.0 + 3.0 * z * z / 20.0 - z * z * z / 60.0);
  }
  return NAN;
}

Vector random_pendulum_state(std::mt19937& rng) {
  std::uniform_real_distribution<double> p(-1.0, 1.0), th(-M_PI, M_PI), v(-2.0, 2.0);
  Vector x(4);
  x << p(rng), th(rng), v(rng), v(rng);
  return x;
}

}  // namespace

TEST(Butcher, RadauTwoStageCoefficients) {
  const auto t = radau_iia(2);
  Matrix A(2, 2);
  A << 5.0 / 12.0, -1.0 / 12.0, 3.0 / 4.0, 1.0 / 4.0;
  EXPECT_LT((t.A - A).lpNorm<Eigen::Infinity>(), 1e-15);
  EXPECT_NEAR(t.b(0), 0.75, 1e-15);
  EXPECT_NEAR(t.b(1), 0.25, 1e-15);
  EXPECT_NEAR(t.c(0), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(t.c(1), 1.0, 1e-15);
  EXPECT_EQ(t.order, 3);
}

TEST(Butcher, RadauThreeStageCoefficients) {
  const auto t = radau_iia(3);
  const double r6 = std::sqrt(6.0);
  EXPECT_NEAR(t.c(0), (4.0 - r6) / 10.0, 1e-15);
  EXPECT_NEAR(t.c(1), (4.0 + r6) / 10.0, 1e-15);
  EXPECT_NEAR(t.b(0), (16.0 - r6) / 36.0, 1e-15);
  EXPECT_NEAR(t.b(1), (16.0 + r6) / 36.0, 1e-15);
  EXPECT_NEAR(t.b(2), 1.0 / 9.0, 1e-15);
}

TEST(Butcher, StiffAccuracyAndPositiveWeights) {
  for (int s = 1; s <= 9; ++s) {
    const auto t = radau_iia(s);
    EXPECT_EQ(t.order, 2 * s - 1);
    EXPECT_TRUE(t.nonnegative_weights());
    EXPECT_NEAR(t.b.sum(), 1.0, 1e-14);
    EXPECT_LT((t.A.row(s - 1).transpose() - t.b).lpNorm<Eigen::Infinity>(), 1e-14) << s;
    EXPECT_LT((t.A.rowwise().sum() - t.c).lpNorm<Eigen::Infinity>(), 1e-14) << s;
  }
  EXPECT_THROW(radau_iia(0), InvalidArgument);
}

TEST(Integrator, EmpiricalOrderOnDecay) {
  const double exact = std::exp(-1.0);
  for (int s = 1; s <= 3; ++s) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int ns[] = {2, 4, 8, 16};
    for (int n : ns) {
      const double lx = std::log(1.0 / n);
      const double ly = std::log(std::abs(integrate_decay(s, n) - exact));
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    const double slope = (4 * sxy - sx * sy) / (4 * sxx - sx * sx);
    EXPECT_GE(slope, 2.0 * s - 1.2) << "s=" << s;
  }
}

TEST(Integrator, LinearStepMatchesStabilityFunction) {
  for (int s = 1; s <= 3; ++s) {
    for (double z : {-0.1, -1.0, -7.5, 0.3}) {
      IrkSettings st;
      st.tableau = radau_iia(s);
      IrkIntegrator irk(decay_model(z), st);
      irk.step(0.0, 1.0, Vector::Ones(1), Vector::Zero(1));
      EXPECT_NEAR(irk.x_next()(0), radau_stability(s, z), 1e-13) << s << " " << z;
      EXPECT_NEAR(irk.sensitivity()(0, 0), radau_stability(s, z), 1e-13);
    }
  }
}

TEST(Integrator, PendulumSensitivitiesMatchFiniteDifferences) {
  PendulumParams par;
  const auto model = make_pendulum_model(par);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> ud(-20.0, 20.0), dd(0.01, 0.2);
  std::uniform_int_distribution<int> sd(1, 4);
  for (int k = 0; k < 50; ++k) {
    IrkSettings st;
    st.tableau = radau_iia(sd(rng));
    st.n_steps = 1 + k % 3;
    st.newton_tol = 1e-14;
    const Vector x = random_pendulum_state(rng);
    const Vector u = Vector::Constant(1, ud(rng));
    const double dt = dd(rng);
    const auto res = irk_step_with_sens(model, st, 0.0, dt, x, u);
    const auto f = [&](const oracle::Vec& w) {
      return oracle::Vec(irk_step_with_sens(model, st, 0.0, dt, w.head(4), w.tail(1)).x_next);
    };
    Vector w(5);
    w << x, u;
    const Matrix fd = oracle::central_jacobian(f, w, 1e-6);
    EXPECT_LT(oracle::rel_inf(res.S, fd), 1e-5) << "sample " << k;
    EXPECT_EQ(static_cast<int>(res.substeps.size()), st.n_steps);
  }
}

TEST(Integrator, ExplicitModelAgreesWithPendulumRhs) {
  PendulumParams par;
  const auto model = make_pendulum_model(par);
  std::mt19937 rng(3);
  for (int k = 0; k < 20; ++k) {
    const Vector x = random_pendulum_state(rng);
    const Vector u = Vector::Constant(1, 3.0 * k - 30.0);
    const Vector xdot = pendulum_rhs(par, x, u(0));
    EXPECT_LT(model.residual(0.0, x, xdot, u).lpNorm<Eigen::Infinity>(), 1e-12);
  }
}

TEST(Integrator, EnergyConservedWithoutForce) {
  PendulumParams par;
  IrkSettings st;
  st.n_steps = 10;
  IrkIntegrator irk(make_pendulum_model(par), st);
  Vector x(4);
  x << 0.0, 2.0, 0.0, 0.0;
  const double e0 = pendulum_energy(par, x);
  for (int k = 0; k < 50; ++k) {
    irk.step(0.0, 0.02, x, Vector::Zero(1));
    x = irk.x_next();
  }
  EXPECT_NEAR(pendulum_energy(par, x), e0, 1e-9 * std::max(1.0, std::abs(e0)));
}

TEST(Integrator, DeterministicAndWorkspaceIndependentOfSubsteps) {
  PendulumParams par;
  const auto model = make_pendulum_model(par);
  Vector x(4);
  x << 0.1, 0.7, -0.2, 0.3;
  const Vector u = Vector::Constant(1, 5.0);
  IrkSettings st;
  IrkIntegrator a(model, st), b(model, st);
  a.step(0.0, 0.1, x, u);
  b.step(0.0, 0.1, x, u);
  EXPECT_EQ(a.x_next(), b.x_next());
  EXPECT_EQ(a.sensitivity(), b.sensitivity());

  IrkSettings many = st;
  many.n_steps = 25;
  IrkIntegrator c(model, many);
  EXPECT_EQ(a.workspace_size(), c.workspace_size());
}

TEST(Integrator, InvalidSettingsRejected) {
  IrkSettings st;
  st.n_steps = 0;
  EXPECT_THROW(IrkIntegrator(decay_model(-1.0), st), InvalidArgument);
}
