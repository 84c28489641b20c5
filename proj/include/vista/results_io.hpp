#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "vista/harness.hpp"

namespace vista {

inline constexpr const char* kAggregateHeader =
    "t,mean_loss,std_loss,mean_gradsq,std_gradsq,mean_eta,accept_rate,saturate_rate,mean_b";
inline constexpr const char* kTraceHeader =
    "run,seed,t,eta,b,accepted,saturated,u,tau,loss,gradsq,est_err_sq,r_star";

void write_aggregate_csv(std::span<const AggregateRow> rows, std::ostream& out);
std::vector<AggregateRow> read_aggregate_csv(std::istream& in);

/// One row per (run, round). b0 is recovered from each run's first round,
/// where the learning rate always equals b0.
void write_trace_csv(std::span<const RunRecord> runs, std::ostream& out);
std::vector<RunRecord> read_trace_csv(std::istream& in);

/// Final metrics, per-run summaries, config echo and seeds.
std::string summary_json(const BatchResult& batch);

struct WrittenFiles {
  std::vector<std::filesystem::path> paths;
};

/// <dir>/<label>.csv, <label>_ma.csv (when smoothing is on),
/// <label>_summary.json and <label>_trace.csv (when tracing is on).
WrittenFiles write_batch(const BatchResult& batch, const std::filesystem::path& dir);

/// Per-policy files plus comparison.csv (aligned mean loss / grad_norm_sq
/// columns) and comparison.json (final-value ranking).
WrittenFiles write_comparison(std::span<const BatchResult> batches, const ComparisonTable& table,
                              const std::filesystem::path& dir);

}  // namespace vista
