#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vista/config.hpp"
#include "vista/equilibrium.hpp"
#include "vista/objectives.hpp"

namespace vista {

struct RoundRecord {
  std::size_t t = 0;
  double eta_applied = 0.0;
  double b_applied = 0.0;  // learning rate in force this round, applied or not
  bool accepted = false;
  bool saturated = false;
  double loss = 0.0;          // L(W_t), after the round
  double grad_norm_sq = 0.0;  // ||grad L(W_{t-1})||^2, before the round
  std::optional<double> est_err_sq;
  double r_star_applied = 0.0;
  std::size_t u = 0;  // counters after the round
  std::size_t tau = 0;
};

struct RunSummary {
  double final_loss = 0.0;
  double min_grad_norm_sq = 0.0;
  double acceptance_rate = 0.0;
  std::optional<std::size_t> saturation_entry_round;
};

struct RunRecord {
  std::size_t run_index = 0;
  std::uint64_t seed = 0;
  double b0 = 0.0;
  std::vector<RoundRecord> rounds;
  ParamVector final_w;
  RunSummary summary;
  bool left_region = false;
  std::size_t clamped_lookups = 0;
  std::vector<std::string> warnings;
};

/// Stream seed of run `run_index` under `master`.
std::uint64_t run_seed(std::uint64_t master, std::size_t run_index);

/// Loads the curve from its cache file, or tabulates it (and writes the
/// cache when a path is configured).
std::shared_ptr<const EquilibriumCurve> resolve_curve(const ExperimentConfig& config);

/// T rounds of announce -> best response -> reports -> acceptance ->
/// estimate -> controller update. Round t draws from
/// derive_seed(seed, round_reports, {t}); nothing else consumes randomness.
RunRecord run_single(const ExperimentConfig& config, const Objective& objective,
                     std::shared_ptr<const EquilibriumCurve> curve, std::uint64_t seed);

RunRecord run_single(const ExperimentConfig& config, std::uint64_t seed);

struct AggregateRow {
  std::size_t t = 0;
  double mean_loss = 0.0;
  double std_loss = 0.0;
  double mean_gradsq = 0.0;
  double std_gradsq = 0.0;
  double mean_eta = 0.0;
  double accept_rate = 0.0;
  double saturate_rate = 0.0;
  double mean_b = 0.0;
};

struct Aggregate {
  std::size_t runs = 0;
  std::vector<AggregateRow> rows;
  /// Same columns after a trailing moving average of each run's loss and
  /// grad_norm_sq series; empty when the window is 0 or 1.
  std::vector<AggregateRow> moving_average_rows;
};

/// Per-round mean and sample standard deviation across runs, in run order.
Aggregate aggregate_runs(std::span<const RunRecord> runs, std::size_t stride = 1,
                         std::size_t ma_window = 0);

struct BatchResult {
  ExperimentConfig config;
  std::shared_ptr<const EquilibriumCurve> curve;
  std::vector<RunRecord> runs;
  Aggregate aggregate;

  std::string label() const { return config.policy.display_label(); }
};

/// Runs config.run.runs seeds, possibly concurrently; the result does not
/// depend on the thread count.
BatchResult run_batch(const ExperimentConfig& config,
                      std::shared_ptr<const EquilibriumCurve> curve = nullptr);

struct ComparisonTable {
  std::vector<std::string> labels;
  std::vector<const Aggregate*> columns;
  std::vector<std::size_t> ranking;  // column indices, best final mean grad_norm_sq first
};

/// Throws ConfigError unless every config shares objective, network,
/// utility and horizon.
void check_comparable(std::span<const ExperimentConfig> configs);

ComparisonTable compare(std::span<const BatchResult> batches);

}  // namespace vista
