#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "vista/rng.hpp"
#include "vista/vector_ops.hpp"

namespace vista {

/// Node population. Honest nodes occupy report indices [0, n_honest),
/// adversarial nodes the rest.
struct NetworkSpec {
  std::size_t n = 2;
  std::size_t n_honest = 1;
  double delta = 1.0;  // honest noise bound

  std::size_t n_adversarial() const { return n - n_honest; }
  void validate() const;  // throws ConfigError
};

/// Radially symmetric adversary: every adversarial node reports the same
/// noise r * u, with u uniform on the unit sphere (a random sign when d = 1).
struct AdversaryStrategy {
  double magnitude = 0.0;
};

struct RoundReports {
  std::vector<ParamVector> reports;
  ParamVector true_grad;  // telemetry only; never read by the acceptance test or estimator
};

/// Uniform draw from the d-ball of radius delta (the interval [-delta, delta] when d = 1).
ParamVector sample_honest_noise(std::size_t d, double delta, Rng& rng);

/// Uniform direction on the unit sphere (a random sign when d = 1).
ParamVector sample_unit_direction(std::size_t d, Rng& rng);

ParamVector sample_adversarial_noise(const AdversaryStrategy& strategy, std::size_t d, Rng& rng);

/// Honest reports get fresh independent noise; adversarial reports share one realization.
RoundReports make_reports(const ParamVector& grad, const NetworkSpec& net,
                          const AdversaryStrategy& strategy, Rng& rng);

double max_pairwise_distance(std::span<const ParamVector> reports);

/// True iff every pair of reports is within eta * delta (ties accept).
/// Throws PolicyError when eta < 2.
bool check_acceptance(const RoundReports& reports, double eta, double delta);

}  // namespace vista
