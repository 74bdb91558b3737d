// Acceptance checks. One PASS/FAIL line per criterion; exit status 1 if any fail.

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "gnrk/bench/closed_loop.hpp"
#include "gnrk/bench/config.hpp"
#include "gnrk/bench/report.hpp"
#include "gnrk/dare.hpp"
#include "gnrk/gnrk_cost.hpp"
#include "gnrk/irk.hpp"
#include "gnrk/ocp_qp.hpp"
#include "gnrk/pendulum.hpp"
#include "oracles.hpp"

using namespace gnrk;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(const std::string& name, bool ok, const std::string& detail) {
  std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Vector random_state(std::mt19937& rng) {
  std::uniform_real_distribution<double> p(-1.5, 1.5), th(-M_PI, M_PI), v(-2.0, 2.0);
  Vector x(4);
  x << p(rng), th(rng), v(rng), v(rng);
  return x;
}

void integrator_order() {
  const auto t0 = Clock::now();
  const auto model = make_lti_model(Matrix::Constant(1, 1, -1.0), Matrix::Zero(1, 1));
  bool ok = true;
  std::string detail;
  for (int s = 1; s <= 3; ++s) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int n : {2, 4, 8, 16}) {
      IrkSettings st;
      st.tableau = radau_iia(s);
      st.n_steps = n;
      IrkIntegrator irk(model, st);
      irk.step(0.0, 1.0, Vector::Ones(1), Vector::Zero(1));
      const double lx = std::log(1.0 / n);
      const double ly = std::log(std::abs(irk.x_next()(0) - std::exp(-1.0)));
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    const double slope = (4 * sxy - sx * sy) / (4 * sxx - sx * sx);
    ok = ok && slope >= 2.0 * s - 1.2;
    detail += "s=" + std::to_string(s) + " order " + fmt("%.3f", slope) + "; ";
  }
  const double el = seconds_since(t0);
  report("integrator_order", ok && el < 1.0, detail + fmt("runtime %.3f s", el));
}

void sensitivity_exactness() {
  const auto t0 = Clock::now();
  const auto model = make_pendulum_model(PendulumParams{});
  std::mt19937 rng(101);
  std::uniform_real_distribution<double> ud(-20.0, 20.0), dd(0.01, 0.2);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    IrkSettings st;
    st.newton_tol = 1e-14;
    const Vector x = random_state(rng);
    const Vector u = Vector::Constant(1, ud(rng));
    const double dt = dd(rng);
    const auto res = irk_step_with_sens(model, st, 0.0, dt, x, u);
    Vector w(5);
    w << x, u;
    const auto f = [&](const oracle::Vec& z) {
      return oracle::Vec(irk_step_with_sens(model, st, 0.0, dt, z.head(4), z.tail(1)).x_next);
    };
    worst = std::max(worst, oracle::rel_inf(res.S, oracle::central_jacobian(f, w, 1e-6)));
  }
  const double el = seconds_since(t0);
  report("sensitivity_exactness", worst <= 1e-5 && el < 5.0,
         fmt("max rel err %.2e", worst) + fmt(", runtime %.3f s", el));
}

void gradient_exactness() {
  const auto t0 = Clock::now();
  const auto model = make_pendulum_model(PendulumParams{});
  const auto cost = make_pendulum_cost(PendulumCostWeights{});
  IrkSettings st;
  st.newton_tol = 1e-14;
  GnrkIntegrator gi(model, cost, st), probe(model, cost, st);
  std::mt19937 rng(202);
  std::uniform_real_distribution<double> ud(-20.0, 20.0), dd(0.01, 0.2);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const Vector x = random_state(rng);
    const Vector u = Vector::Constant(1, ud(rng));
    const double dt = dd(rng);
    const auto out = gi.step(0.0, dt, x, u);
    Vector w(5);
    w << x, u;
    const auto L = [&](const oracle::Vec& z) {
      return probe.step(0.0, dt, Vector(z.head(4)), Vector(z.tail(1))).L;
    };
    worst = std::max(worst, oracle::rel_inf(out.grad, oracle::central_gradient(L, w, 1e-6)));
  }
  const double el = seconds_since(t0);
  report("gnrk_gradient_exactness", worst <= 1e-5 && el < 10.0,
         fmt("max rel err %.2e", worst) + fmt(", runtime %.3f s", el));
}

void psd_guarantee() {
  const auto model = make_pendulum_model(PendulumParams{});
  const auto cost = make_pendulum_cost(PendulumCostWeights{});
  std::mt19937 rng(303);
  std::uniform_real_distribution<double> ud(-40.0, 40.0), dd(0.005, 0.1);
  double worst = INFINITY;
  int count = 0;
  for (int s = 1; s <= 4; ++s) {
    IrkSettings st;
    st.tableau = radau_iia(s);
    GnrkIntegrator gi(model, cost, st);
    for (int k = 0; k < 250; ++k, ++count) {
      const auto out = gi.step(0.0, dd(rng), random_state(rng), Vector::Constant(1, ud(rng)));
      worst = std::min(worst, Eigen::SelfAdjointEigenSolver<Matrix>(out.H).eigenvalues().minCoeff());
    }
  }
  report("psd_guarantee", count == 1000 && worst >= -1e-10,
         std::to_string(count) + " blocks, min eigenvalue " + fmt("%.3e", worst));
}

void sn_gnrk_coincidence() {
  const auto model = make_pendulum_model(PendulumParams{});
  const auto cost = make_pendulum_cost(PendulumCostWeights{});
  IrkSettings st;
  st.tableau = explicit_euler();
  st.n_steps = 1;
  GnrkIntegrator gi(model, cost, st);
  std::mt19937 rng(404);
  std::uniform_real_distribution<double> ud(-30.0, 30.0), dd(0.01, 0.3);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Vector x = random_state(rng);
    const Vector u = Vector::Constant(1, ud(rng));
    const double dt = dd(rng);
    const auto a = gi.step(0.0, dt, x, u);
    const auto b = sn_cost_terms(cost, dt, x, u);
    worst = std::max({worst, std::abs(a.L - b.L) / std::max(1.0, std::abs(b.L)),
                      oracle::rel_inf(a.grad, b.grad), oracle::rel_inf(a.H, b.H)});
  }
  report("sn_gnrk_coincidence", worst <= 1e-14, fmt("max rel diff %.2e", worst));
}

void qp_oracle() {
  const auto t0 = Clock::now();
  std::mt19937 rng(505);
  std::normal_distribution<double> nd;
  OcpQpSolver solver;
  double worst = 0.0;
  int solved = 0;
  for (int k = 0; k < 100; ++k) {
    const int N = 2 + k % 3, nx = 2 + k % 2, nu = 1 + (k / 3) % 2;
    const auto qp = oracle::random_qp(rng, N, nx, nu);
    Vector dx0(nx);
    for (int i = 0; i < nx; ++i) dx0(i) = nd(rng);
    const auto ref = oracle::dense_qp(qp, dx0);
    if (!ref) continue;
    QpSolution sol;
    try {
      solver.solve(qp, dx0, QpOptions{1e-12, 100}, sol);
    } catch (const std::exception&) {
      continue;
    }
    ++solved;
    const auto diff = [](const std::vector<Vector>& a, const std::vector<Vector>& b) {
      double d = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, (a[i] - b[i]).lpNorm<Eigen::Infinity>());
      return d;
    };
    worst = std::max({worst, diff(sol.dx, ref->dx), diff(sol.du, ref->du), diff(sol.lam, ref->lam),
                      diff(sol.z_lo, ref->z_lo), diff(sol.z_hi, ref->z_hi)});
  }
  const double el = seconds_since(t0);
  report("qp_oracle_equivalence", solved == 100 && worst <= 1e-7 && el < 30.0,
         std::to_string(solved) + "/100 solved, max diff " + fmt("%.2e", worst) +
             fmt(", runtime %.3f s", el));
}

void dare() {
  const Matrix one = Matrix::Ones(1, 1);
  const double golden = solve_dare(one, one, one, one)(0, 0);
  const double err = std::abs(golden - (1.0 + std::sqrt(5.0)) / 2.0);

  const PendulumCostWeights w;
  const double Ts = 0.02;
  const auto lin = discretize_linearization(make_pendulum_model(PendulumParams{}), IrkSettings{}, Ts,
                                            Vector::Zero(4), Vector::Zero(1));
  const Matrix Q = Matrix(w.Q_diag.asDiagonal()) * Ts;
  const Matrix R = Matrix::Constant(1, 1, w.R * Ts);
  const double res = dare_residual(lin.A, lin.B, Q, R, solve_dare(lin.A, lin.B, Q, R));
  report("dare", err <= 1e-9 && res <= 1e-10,
         fmt("scalar err %.2e", err) + fmt(", pendulum residual %.2e", res));
}

double mean_last3(const std::vector<double>& k) {
  if (k.size() < 3) return NAN;
  return (k[k.size() - 1] + k[k.size() - 2] + k[k.size() - 3]) / 3.0;
}

void closed_loop_matrix() {
  using namespace gnrk::bench;
  const auto cfg = parse_config_file(GNRK_CONFIG_DIR "/closed_loop.ini");
  const auto t0 = Clock::now();
  MatrixOptions opt;
  opt.contraction = false;
  const auto m = run_benchmark_matrix(cfg, opt);
  const double el = seconds_since(t0);

  const auto get = [&](const char* id) -> const VariantOutcome* {
    const auto* v = m.find(id);
    return v != nullptr && v->ok ? v : nullptr;
  };
  const auto* rk_rti = get("rk_N20_T4_nonuni_rti");
  const auto* sn_rti = get("sn_N20_T4_nonuni_rti");
  const auto* rk_sqp = get("rk_N20_T4_nonuni_sqp");
  const auto* sn_sqp = get("sn_N20_T4_nonuni_sqp");

  // Suboptimality ordering.
  {
    bool ok = rk_rti && sn_rti;
    std::string d;
    if (ok) {
      const double a = rk_rti->rel_subopt_pct, b = sn_rti->rel_subopt_pct;
      ok = a <= 10.0 && b >= 25.0 && b >= 5.0 * a;
      d = fmt("GNRK-RTI %.2f %%", a) + fmt(", GNSN-RTI %.2f %%", b) + fmt(", ratio %.2f", b / a);
    } else {
      d = "nonuniform RTI variants missing or failed";
    }
    for (const char* id : {"rk_N20_T4_uni_rti", "sn_N20_T4_uni_rti", "rk_N20_T4_uni_sqp", "sn_N20_T4_uni_sqp"}) {
      const auto* v = get(id);
      ok = ok && v && v->rel_subopt_pct > 200.0;
      d += std::string("; ") + id + (v ? fmt(" %.0f %%", v->rel_subopt_pct) : " failed");
    }
    for (const char* id : {"rk_N20_T0.4_uni_rti", "rk_N20_T0.4_uni_sqp"}) {
      const auto* v = get(id);
      const double xf = v ? v->run->result.final_state_inf_norm() : NAN;
      ok = ok && v && v->rel_subopt_pct > 1000.0 && xf > 0.05;
      d += std::string("; ") + id + (v ? fmt(" %.0f %%", v->rel_subopt_pct) + fmt(" |x(T)| %.3f", xf) : " failed");
    }
    ok = ok && el < 600.0;
    d += fmt("; matrix runtime %.1f s", el);
    report("closed_loop_suboptimality", ok, d);
  }

  // Runtime overhead.
  if (rk_rti && sn_rti) {
    const double a = rk_rti->run->timing.t_max_ms, b = sn_rti->run->timing.t_max_ms;
    report("runtime_overhead", a <= 1.25 * b,
           fmt("GNRK-RTI max %.3f ms", a) + fmt(", GNSN-RTI max %.3f ms", b) + fmt(", ratio %.3f", a / b));
  } else {
    report("runtime_overhead", false, "nonuniform RTI variants missing or failed");
  }

  // Iterations.
  {
    bool ok = true;
    int rti = 0;
    for (const auto& v : m.variants) {
      const auto* c = cfg.find(v.id);
      if (c == nullptr || c->algorithm != Algorithm::RTI) continue;
      ++rti;
      ok = ok && v.ok;
      if (v.ok)
        for (int it : v.run->result.iterations) ok = ok && it == 1;
    }
    std::string d = std::to_string(rti) + " RTI variants all 1 iteration";
    if (rk_sqp && sn_sqp) {
      const int a = rk_sqp->run->result.max_iterations(), b = sn_sqp->run->result.max_iterations();
      ok = ok && rti > 0 && a <= b;
      d += "; SQP max iterations GNRK " + std::to_string(a) + " vs GNSN " + std::to_string(b);
    } else {
      ok = false;
      d += "; nonuniform SQP variants missing or failed";
    }
    report("iteration_behavior", ok, d);
  }
}

void contraction() {
  using namespace gnrk::bench;
  const auto cfg = parse_config_file(GNRK_CONFIG_DIR "/contraction.ini");
  const auto* rk = cfg.find("rk_N20_T4_uni");
  const auto* sn = cfg.find("sn_N20_T4_uni");
  if (!rk || !sn) {
    report("contraction", false, "variants missing");
    return;
  }
  try {
    const double a = mean_last3(contraction_for_variant(*rk, M_PI / 4));
    const double b = mean_last3(contraction_for_variant(*sn, M_PI / 4));
    report("contraction", a < b, fmt("theta0=pi/4 mean last three kappa: GNRK %.4f", a) + fmt(", GNSN %.4f", b));
  } catch (const std::exception& e) {
    report("contraction", false, e.what());
  }
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<void()>> checks[] = {
      {"integrator_order", integrator_order},
      {"sensitivity_exactness", sensitivity_exactness},
      {"gnrk_gradient_exactness", gradient_exactness},
      {"psd_guarantee", psd_guarantee},
      {"sn_gnrk_coincidence", sn_gnrk_coincidence},
      {"qp_oracle_equivalence", qp_oracle},
      {"dare", dare},
      {"closed_loop", closed_loop_matrix},
      {"contraction", contraction},
  };
  for (const auto& [name, fn] : checks) {
    try {
      fn();
    } catch (const std::exception& e) {
      report(name, false, std::string("exception: ") + e.what());
    }
  }
  return failures == 0 ? 0 : 1;
}
