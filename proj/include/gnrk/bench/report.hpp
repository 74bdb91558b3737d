#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gnrk/bench/closed_loop.hpp"
#include "gnrk/bench/config.hpp"

namespace gnrk::bench {

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

struct VariantOutcome {
  std::string id;
  bool ok = false;
  std::string error;  // empty when ok
  std::optional<TimedResult> run;
  double rel_subopt_pct = 0.0;
};

struct ContractionSeries {
  std::string variant;
  double theta0 = 0.0;
  bool ok = false;
  std::string error;
  std::vector<double> kappa;
};

struct MatrixResult {
  std::vector<VariantOutcome> variants;
  std::vector<ContractionSeries> contraction;

  const VariantOutcome* find(const std::string& id) const;
  bool all_ok() const;
};

struct MatrixOptions {
  bool closed_loop = true;
  /// Contraction series for converged-SQP variants only, or for every
  /// variant (then solved with converged SQP regardless of its algorithm).
  bool contraction_sqp_only = true;
  bool contraction = true;
  /// Overrides timing_repeats of every variant when set.
  std::optional<int> timing_repeats;
};

/// Runs every variant (sequentially) plus the contraction sweep. Failures are
/// recorded per variant and the matrix continues.
MatrixResult run_benchmark_matrix(const BenchConfig& config, const MatrixOptions& options = {});

/// Contraction rates of a converged SQP solve from (0, theta0, 0, 0).
std::vector<double> contraction_for_variant(const VariantConfig& cfg, double theta0);

void write_results_csv(std::ostream& os, const MatrixResult& m);
void write_trajectories_csv(std::ostream& os, const MatrixResult& m);
void write_contraction_csv(std::ostream& os, const MatrixResult& m);

/// Writes results.csv, trajectories.csv and contraction.csv into dir.
void write_all_csv(const std::filesystem::path& dir, const MatrixResult& m);
void write_contraction_only(const std::filesystem::path& dir, const MatrixResult& m);

}  // namespace gnrk::bench
