#include "gnrk/bench/closed_loop.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "gnrk/dare.hpp"
#include "gnrk/errors.hpp"

namespace gnrk::bench {

Plant::Plant(const PendulumParams& params, const PendulumCostWeights& weights,
             IrkSettings settings)
    : integrator_(augment_with_cost_state(make_pendulum_model(params), make_pendulum_cost(weights)),
                  std::move(settings)),
      xa_(5) {}

PlantStep Plant::step(const Vector& x, const Vector& u, double Ts) {
  xa_.head(4) = x;
  xa_(4) = 0.0;
  integrator_.step(0.0, Ts, xa_, u);
  const Vector& next = integrator_.x_next();
  return {next.head(4), next(4)};
}

OcpFormulation make_pendulum_ocp(const VariantConfig& cfg) {
  cfg.validate();
  IrkSettings irk;
  irk.tableau = radau_iia(cfg.n_stages);
  irk.n_steps = cfg.n_steps;
  DynamicsModel model = make_pendulum_model(cfg.pendulum);
  ResidualCost cost = make_pendulum_cost(cfg.weights);

  const Matrix Q = cfg.weights.Q_diag.asDiagonal();
  const Matrix R = Matrix::Constant(1, 1, cfg.weights.R);
  const double dare_dt = cfg.dare_dt > 0.0 ? cfg.dare_dt : cfg.Ts;
  Matrix P;
  if (cfg.dare_scale_weights) {
    P = riccati_terminal_weight(model, irk, dare_dt, Vector::Zero(4), Vector::Zero(1), Q, R);
  } else {
    const DiscreteLinearization lin =
        discretize_linearization(model, irk, dare_dt, Vector::Zero(4), Vector::Zero(1));
    P = solve_dare(lin.A, lin.B, Q, R);
  }

  // An NLS terminal term with weight P contributes x'Px / 2.
  if (cfg.terminal_cost == TerminalCost::Nls) P *= 0.5;
  Grid grid = cfg.grid == GridKind::Uniform ? make_grid_uniform(cfg.T, cfg.N)
                                            : make_grid_nonuniform(cfg.T, cfg.N, cfg.Ts);
  OcpFormulation ocp{std::move(model),
                     std::move(cost),
                     std::move(grid),
                     Vector::Constant(1, cfg.u_min),
                     Vector::Constant(1, cfg.u_max),
                     P,
                     cfg.cost_discretization,
                     irk};
  ocp.validate();
  return ocp;
}

double ClosedLoopResult::final_state_inf_norm() const {
  return x.empty() ? 0.0 : x.back().lpNorm<Eigen::Infinity>();
}

int ClosedLoopResult::max_iterations() const {
  return iterations.empty() ? 0 : *std::max_element(iterations.begin(), iterations.end());
}

double ClosedLoopResult::median_iterations() const {
  if (iterations.empty()) return 0.0;
  std::vector<int> v = iterations;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

ClosedLoopResult run_closed_loop(const VariantConfig& cfg) {
  SqpOptions opts;
  opts.mode = cfg.algorithm == Algorithm::RTI ? SqpMode::RTI : SqpMode::ConvergedSQP;
  opts.tol_stationarity = cfg.tol_stationarity;
  opts.max_iter = cfg.max_iter;
  opts.qp_tol = cfg.qp_tol;
  SqpSolver solver(make_pendulum_ocp(cfg), opts);
  Plant plant(cfg.pendulum, cfg.weights);

  const int steps = static_cast<int>(std::lround(cfg.sim_duration / cfg.Ts));
  ClosedLoopResult res;
  res.variant = cfg.id;
  res.t.reserve(steps + 1);
  res.x.reserve(steps + 1);
  res.cost_state.reserve(steps + 1);
  Vector x = cfg.x0;
  res.t.push_back(0.0);
  res.x.push_back(x);
  res.cost_state.push_back(0.0);

  NlpIterate warm;
  bool have_warm = false;
  Vector u(1);
  for (int k = 0; k < steps; ++k) {
    SqpResult sol;
    const auto start = std::chrono::steady_clock::now();
    try {
      sol = solver.solve(x, have_warm ? &warm : nullptr);
    } catch (const Error& e) {
      throw ClosedLoopFailure(k, e.what());
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!sol.iterate.all_finite()) throw ClosedLoopFailure(k, "non-finite solver iterate");

    warm = std::move(sol.iterate);
    have_warm = true;
    u = warm.u[0];

    PlantStep ps;
    try {
      ps = plant.step(x, u, cfg.Ts);
    } catch (const Error& e) {
      throw ClosedLoopFailure(k, std::string("plant: ") + e.what());
    }
    x = ps.x_next;
    res.u.push_back(u(0));
    res.iterations.push_back(sol.stats.iterations);
    res.solve_time.push_back(elapsed);
    res.preparation_time.push_back(sol.stats.time_preparation);
    res.feedback_time.push_back(sol.stats.time_feedback);
    res.converged.push_back(sol.stats.converged);
    res.t.push_back((k + 1) * cfg.Ts);
    res.x.push_back(x);
    res.cost_state.push_back(res.cost_state.back() + ps.cost_increment);
  }
  return res;
}

double relative_suboptimality(const ClosedLoopResult& result, const ClosedLoopResult& baseline) {
  const double base = baseline.total_cost();
  if (!(base > 0.0)) throw InvalidArgument("relative_suboptimality: baseline cost must be positive");
  return 100.0 * (result.total_cost() - base) / base;
}

TimingSummary summarize_times(const std::vector<double>& seconds) {
  TimingSummary s;
  if (seconds.empty()) return s;
  std::vector<double> v = seconds;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  s.t_min_ms = 1e3 * v.front();
  s.t_max_ms = 1e3 * v.back();
  s.t_median_ms = 1e3 * (n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]));
  return s;
}

TimedResult timing_protocol(const VariantConfig& cfg, int repeats) {
  if (repeats < 1) throw InvalidArgument("timing_protocol: repeats must be >= 1");
  TimedResult out;
  for (int r = 0; r < repeats; ++r) {
    ClosedLoopResult res = run_closed_loop(cfg);
    if (r == 0) {
      out.min_solve_time = res.solve_time;
      out.result = std::move(res);
    } else {
      for (std::size_t k = 0; k < out.min_solve_time.size(); ++k)
        out.min_solve_time[k] = std::min(out.min_solve_time[k], res.solve_time[k]);
    }
  }
  out.timing = summarize_times(out.min_solve_time);
  return out;
}

}  // namespace gnrk::bench
