// Closed-loop pendulum benchmark driver.
#include <CLI11.hpp>

#include <iostream>

#include "gnrk/bench/config.hpp"
#include "gnrk/bench/report.hpp"
#include "gnrk/errors.hpp"

using namespace gnrk::bench;

namespace {

void report_failures(const MatrixResult& m) {
  for (const auto& v : m.variants)
    if (!v.ok) std::cerr << "variant " << v.id << " failed: " << v.error << '\n';
  for (const auto& c : m.contraction)
    if (!c.ok)
      std::cerr << "contraction " << c.variant << " theta0=" << format_double(c.theta0)
                << " failed: " << c.error << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GNRK pendulum closed-loop benchmark"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int repeats = 0;

  auto* run = app.add_subcommand("run", "run every variant, write results/trajectories/contraction CSVs");
  run->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "output directory")->required();
  run->add_option("--repeats", repeats, "override timing_repeats of every variant")
      ->check(CLI::PositiveNumber);

  auto* con = app.add_subcommand("contraction", "converged SQP contraction rates for every variant");
  con->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);
  con->add_option("--out", out_dir, "output directory")->required();

  auto* list = app.add_subcommand("list-variants", "print the configured variants");
  list->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    const BenchConfig cfg = parse_config_file(config_path);

    if (list->parsed()) {
      for (const auto& v : cfg.variants)
        std::cout << v.id << '\t' << v.describe() << (v.id == cfg.baseline ? "\t(baseline)" : "")
                  << '\n';
      return 0;
    }

    MatrixOptions opts;
    if (con->parsed()) {
      opts.closed_loop = false;
      opts.contraction_sqp_only = false;
    }
    if (repeats > 0) opts.timing_repeats = repeats;
    const MatrixResult m = run_benchmark_matrix(cfg, opts);
    if (con->parsed()) write_contraction_only(out_dir, m);
    else write_all_csv(out_dir, m);

    for (const auto& v : m.variants)
      if (v.ok)
        std::cout << v.id << ": rel_subopt " << format_double(v.rel_subopt_pct) << " %, max_iter "
                  << v.run->result.max_iterations() << ", t_max "
                  << format_double(v.run->timing.t_max_ms) << " ms\n";
    report_failures(m);
    return m.all_ok() ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "bench: " << e.what() << '\n';
    return 1;
  }
}
