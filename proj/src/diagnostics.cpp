#include "vista/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vista/errors.hpp"
#include "vista/estimator.hpp"
#include "vista/workers.hpp"

namespace vista {

HarmonicReport check_harmonic_bound(const RunRecord& run, double b0) {
  HarmonicReport rep;
  rep.min_prefix_slack = std::numeric_limits<double>::infinity();
  const double b0_sq = b0 * b0;
  for (const RoundRecord& r : run.rounds) {
    if (r.saturated) {
      rep.sum += r.b_applied * r.b_applied;
      ++rep.saturated_rounds;
    }
    const double bound = b0_sq * (1.0 + std::log(static_cast<double>(r.t) + 1.0));
    const double slack = bound - rep.sum;
    rep.min_prefix_slack = std::min(rep.min_prefix_slack, slack);
    if (slack < 0.0 && !rep.first_violation) rep.first_violation = r.t;
  }
  rep.bound = b0_sq * (1.0 + std::log(static_cast<double>(run.rounds.size())));
  rep.slack = rep.bound - rep.sum;
  if (run.rounds.empty()) rep.min_prefix_slack = rep.slack;
  return rep;
}

FloorReport check_lr_floor(const RunRecord& run, double b0) {
  FloorReport rep;
  rep.min_ratio = std::numeric_limits<double>::infinity();
  for (const RoundRecord& r : run.rounds) {
    const double root = std::sqrt(static_cast<double>(r.t) + 1.0);
    const double floor = b0 / root;
    rep.min_ratio = std::min(rep.min_ratio, r.b_applied * root / b0);
    if (r.b_applied < floor && !rep.first_violation) rep.first_violation = r.t;
  }
  return rep;
}

PathwiseReport check_counter_coupling(const RunRecord& run, double eta_min) {
  PathwiseReport rep;
  std::size_t u = 0;
  std::size_t tau = 0;
  for (const RoundRecord& r : run.rounds) {
    const std::string at = " at round " + std::to_string(r.t);
    if (r.u < u || r.u - u > 1) rep.violations.push_back("u jumps" + at);
    if (r.tau < tau || r.tau - tau > 1) rep.violations.push_back("tau jumps" + at);
    if ((r.u != u) != r.accepted) rep.violations.push_back("u moves without acceptance" + at);
    if ((r.tau != tau) != r.saturated) rep.violations.push_back("tau disagrees with saturation" + at);
    if (r.tau != tau && r.u == u) rep.violations.push_back("tau moves without u" + at);
    const bool should_saturate = r.accepted && r.eta_applied == eta_min;
    if (r.saturated != should_saturate) {
      rep.violations.push_back("saturation flag inconsistent with eta_min" + at);
    }
    u = r.u;
    tau = r.tau;
  }
  return rep;
}

PathwiseReport check_frozen_on_reject(const RunRecord& run) {
  PathwiseReport rep;
  for (std::size_t i = 0; i < run.rounds.size(); ++i) {
    const RoundRecord& r = run.rounds[i];
    const std::string at = " at round " + std::to_string(r.t);
    if (r.saturated && !r.accepted) rep.violations.push_back("saturated but rejected" + at);
    if (r.est_err_sq.has_value() != r.accepted) {
      rep.violations.push_back("estimator error present iff accepted violated" + at);
    }
    if (!r.accepted && i > 0 && r.loss != run.rounds[i - 1].loss) {
      rep.violations.push_back("loss changed on a rejected round" + at);
    }
  }
  return rep;
}

double descent_bound(const Objective& objective, const ParamVector& w, double b, double pa,
                     double mse) {
  const double ell = objective.smoothness();
  const double g_sq = norm_sq(objective.grad(w));
  return objective.value(w) - b * pa * (1.0 - ell * b / 2.0) * g_sq +
         (ell * b * b / 2.0) * pa * mse;
}

DescentReport check_descent_inequality(const Objective& objective, const ParamVector& w,
                                       double eta, double b, const EquilibriumCurve& curve,
                                       const NetworkSpec& net, const EstimatorSpec& est,
                                       std::size_t samples, Rng& rng) {
  if (samples < kMinDescentSamples) {
    throw ContractViolation("descent probe needs at least 10^5 samples");
  }
  if (!(b > 0.0)) throw ContractViolation("descent probe needs b > 0");
  const ParamVector grad = objective.grad(w);
  const double base = objective.value(w);
  const AdversaryStrategy strategy{r_star_of_eta(curve, eta)};

  DescentReport rep;
  rep.samples = samples;
  // Accumulate L(W_t) - L(w) to keep the variance computation well conditioned.
  double sum = 0.0;
  double sum_sq = 0.0;
  ParamVector next(w.size());
  for (std::size_t k = 0; k < samples; ++k) {
    const RoundReports reports = make_reports(grad, net, strategy, rng);
    double delta = 0.0;
    if (check_acceptance(reports, eta, net.delta)) {
      ++rep.accepted;
      const ParamVector g_hat = estimate(est, reports);
      next = w;
      axpy(-b, g_hat, next);
      delta = objective.value(next) - base;
    }
    sum += delta;
    sum_sq += delta * delta;
  }
  const double n = static_cast<double>(samples);
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
  rep.expected_loss = base + mean;
  rep.stderr_loss = std::sqrt(var / n);
  rep.bound = descent_bound(objective, w, b, pa_of_eta(curve, eta), mse_of_eta(curve, eta));
  rep.slack = rep.bound - rep.expected_loss;
  rep.inconclusive = rep.accepted < 100;
  rep.holds = !rep.inconclusive &&
              rep.expected_loss <= rep.bound + kDescentToleranceSigmas * rep.stderr_loss;
  return rep;
}

RateFitReport rate_fit(std::span<const AggregateRow> aggregate, double tolerance) {
  if (aggregate.empty()) throw ContractViolation("rate_fit needs aggregate rows");
  RateFitReport rep;
  rep.tolerance = tolerance;
  const std::size_t horizon = aggregate.back().t + 1;
  for (std::size_t div : {8u, 4u, 2u, 1u}) {
    const std::size_t cp = horizon / div;
    if (cp < 2) throw ContractViolation("rate_fit needs a horizon of at least 16 rounds");
    rep.checkpoints.push_back(cp);
  }
  for (std::size_t cp : rep.checkpoints) {
    double m = std::numeric_limits<double>::infinity();
    for (const AggregateRow& row : aggregate) {
      if (row.t + 1 <= cp) m = std::min(m, row.mean_gradsq);
    }
    const double tp = static_cast<double>(cp);
    rep.running_min.push_back(m);
    rep.statistic.push_back(m * std::sqrt(tp) / std::log(tp));
  }
  rep.fitted_constant = *std::max_element(rep.statistic.begin(), rep.statistic.end());
  rep.passes = true;
  for (std::size_t i = 0; i + 1 < rep.statistic.size(); ++i) {
    if (rep.statistic[i + 1] > tolerance * rep.statistic[i]) rep.passes = false;
  }
  return rep;
}

}  // namespace vista
