#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vista/equilibrium.hpp"
#include "vista/harness.hpp"
#include "vista/objectives.hpp"

namespace vista {

/// sum over saturated rounds of B_t^2 against b0^2 (1 + ln(T + 1)), checked
/// on every prefix of the run.
struct HarmonicReport {
  double sum = 0.0;
  double bound = 0.0;
  double slack = 0.0;             // bound - sum over the full run
  double min_prefix_slack = 0.0;  // tightest prefix
  std::size_t saturated_rounds = 0;
  std::optional<std::size_t> first_violation;  // round index ending the first bad prefix

  bool ok() const { return !first_violation; }
};

HarmonicReport check_harmonic_bound(const RunRecord& run, double b0);

/// B_t >= b0 / sqrt(t + 1) at every round.
struct FloorReport {
  std::optional<std::size_t> first_violation;
  double min_ratio = 0.0;  // min over t of B_t sqrt(t + 1) / b0

  bool ok() const { return !first_violation; }
};

FloorReport check_lr_floor(const RunRecord& run, double b0);

struct PathwiseReport {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

/// Counters move by 0 or 1 per round, tau only with u, and exactly on
/// accepted rounds taken at eta_min (`eta_min` from the curve).
PathwiseReport check_counter_coupling(const RunRecord& run, double eta_min);

/// Rejected rounds leave the loss unchanged; saturated implies accepted;
/// est_err_sq present iff accepted.
PathwiseReport check_frozen_on_reject(const RunRecord& run);

/// Monte Carlo check of the one-step expected-descent bound
///   E[L(W_t)] <= L(w) - b p (1 - l b / 2) ||grad||^2 + (l b^2 / 2) p sigma^2
/// with p and sigma^2 read from the curve at eta.
struct DescentReport {
  double expected_loss = 0.0;  // Monte Carlo estimate of E[L(W_t)]
  double stderr_loss = 0.0;
  double bound = 0.0;
  double slack = 0.0;  // bound - expected_loss
  std::size_t samples = 0;
  std::size_t accepted = 0;
  bool inconclusive = false;
  bool holds = false;  // expected_loss <= bound + tolerance_sigmas * stderr
};

inline constexpr double kDescentToleranceSigmas = 4.0;
inline constexpr std::size_t kMinDescentSamples = 100'000;

DescentReport check_descent_inequality(const Objective& objective, const ParamVector& w,
                                       double eta, double b, const EquilibriumCurve& curve,
                                       const NetworkSpec& net, const EstimatorSpec& est,
                                       std::size_t samples, Rng& rng);

/// The right-hand side alone, for callers that need it without sampling.
double descent_bound(const Objective& objective, const ParamVector& w, double b, double pa,
                     double mse);

/// Checkpoint statistic m(T') sqrt(T') / ln(T') for T' in {T/8, T/4, T/2, T},
/// with m(T') the running minimum of the mean grad_norm_sq over rounds 1..T'.
struct RateFitReport {
  std::vector<std::size_t> checkpoints;
  std::vector<double> running_min;
  std::vector<double> statistic;
  double fitted_constant = 0.0;  // max of the statistic
  double tolerance = 1.25;
  bool passes = false;  // statistic[i + 1] <= tolerance * statistic[i] for all i
};

RateFitReport rate_fit(std::span<const AggregateRow> aggregate, double tolerance = 1.25);

}  // namespace vista
