#include "gnrk/bench/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>

#include "gnrk/errors.hpp"

namespace gnrk::bench {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw Error("format_double: conversion failed");
  return std::string(buf, end);
}

const VariantOutcome* MatrixResult::find(const std::string& id) const {
  for (const auto& v : variants)
    if (v.id == id) return &v;
  return nullptr;
}

bool MatrixResult::all_ok() const {
  for (const auto& v : variants)
    if (!v.ok) return false;
  for (const auto& c : contraction)
    if (!c.ok) return false;
  return true;
}

std::vector<double> contraction_for_variant(const VariantConfig& cfg, double theta0) {
  SqpOptions opts;
  opts.mode = SqpMode::ConvergedSQP;
  opts.tol_stationarity = cfg.tol_stationarity;
  opts.max_iter = cfg.max_iter;
  opts.qp_tol = cfg.qp_tol;
  const Vector x0 = Eigen::Vector4d(0.0, theta0, 0.0, 0.0);
  return contraction_experiment(make_pendulum_ocp(cfg), x0, opts);
}

namespace {

// Keeps CSV fields on one line and free of separators.
std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ' ';
  return s;
}

}  // namespace

MatrixResult run_benchmark_matrix(const BenchConfig& config, const MatrixOptions& options) {
  MatrixResult m;

  if (options.closed_loop) {
    for (const auto& cfg : config.variants) {
      VariantOutcome out;
      out.id = cfg.id;
      try {
        out.run = timing_protocol(cfg, options.timing_repeats.value_or(cfg.timing_repeats));
        out.ok = true;
      } catch (const Error& e) {
        out.error = e.what();
      }
      m.variants.push_back(std::move(out));
    }

    // Reference cost: the configured baseline variant or the default one.
    std::optional<ClosedLoopResult> base;
    std::string base_error;
    if (!m.variants.empty()) {
      if (const VariantOutcome* b = m.find(config.baseline); b != nullptr) {
        if (b->ok) base = b->run->result;
        else base_error = "baseline failed";
      } else {
        try {
          base = run_closed_loop(config.baseline_variant());
        } catch (const Error& e) {
          base_error = std::string("baseline failed: ") + e.what();
        }
      }
    }
    for (auto& v : m.variants) {
      if (!v.ok) continue;
      if (!base) {
        v.ok = false;
        v.error = base_error;
        continue;
      }
      try {
        v.rel_subopt_pct = relative_suboptimality(v.run->result, *base);
      } catch (const Error& e) {
        v.ok = false;
        v.error = e.what();
      }
    }
  }

  if (options.contraction) {
    for (const auto& cfg : config.variants) {
      if (options.contraction_sqp_only && cfg.algorithm != Algorithm::SQP) continue;
      for (double theta0 : config.contraction_theta0) {
        ContractionSeries c;
        c.variant = cfg.id;
        c.theta0 = theta0;
        try {
          c.kappa = contraction_for_variant(cfg, theta0);
          c.ok = true;
        } catch (const Error& e) {
          c.error = e.what();
        }
        m.contraction.push_back(std::move(c));
      }
    }
  }
  return m;
}

void write_results_csv(std::ostream& os, const MatrixResult& m) {
  os << "variant,rel_subopt_pct,max_iter,median_iter,t_min_ms,t_max_ms,status\n";
  for (const auto& v : m.variants) {
    os << v.id << ',';
    if (v.ok) {
      const auto& r = v.run->result;
      os << format_double(v.rel_subopt_pct) << ',' << r.max_iterations() << ','
         << format_double(r.median_iterations()) << ',' << format_double(v.run->timing.t_min_ms)
         << ',' << format_double(v.run->timing.t_max_ms) << ",ok\n";
    } else {
      os << ",,,,,failed: " << sanitize(v.error) << '\n';
    }
  }
}

void write_trajectories_csv(std::ostream& os, const MatrixResult& m) {
  os << "variant,t,p,theta,s,omega,u\n";
  for (const auto& v : m.variants) {
    if (!v.ok) continue;
    const auto& r = v.run->result;
    for (std::size_t k = 0; k < r.x.size(); ++k) {
      const Vector& x = r.x[k];
      // The last state has no applied control; the final control is held.
      const double u = r.u.empty() ? 0.0 : r.u[std::min(k, r.u.size() - 1)];
      os << v.id << ',' << format_double(r.t[k]) << ',' << format_double(x(0)) << ','
         << format_double(x(1)) << ',' << format_double(x(2)) << ','
         << format_double(x(3)) << ',' << format_double(u) << '\n';
    }
  }
}

void write_contraction_csv(std::ostream& os, const MatrixResult& m) {
  os << "variant,theta0,k,kappa_hat\n";
  for (const auto& c : m.contraction) {
    if (!c.ok) continue;
    for (std::size_t k = 0; k < c.kappa.size(); ++k)
      os << c.variant << ',' << format_double(c.theta0) << ',' << k << ','
         << format_double(c.kappa[k]) << '\n';
  }
}

namespace {

void write_file(const std::filesystem::path& path, void (*fn)(std::ostream&, const MatrixResult&),
                const MatrixResult& m) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  fn(f, m);
  if (!f) throw Error("write to " + path.string() + " failed");
}

}  // namespace

void write_all_csv(const std::filesystem::path& dir, const MatrixResult& m) {
  std::filesystem::create_directories(dir);
  write_file(dir / "results.csv", write_results_csv, m);
  write_file(dir / "trajectories.csv", write_trajectories_csv, m);
  write_file(dir / "contraction.csv", write_contraction_csv, m);
}

void write_contraction_only(const std::filesystem::path& dir, const MatrixResult& m) {
  std::filesystem::create_directories(dir);
  write_file(dir / "contraction.csv", write_contraction_csv, m);
}

}  // namespace gnrk::bench
