#include "vista/workers.hpp"

#include <cmath>
#include <string>

#include "vista/errors.hpp"

namespace vista {

void NetworkSpec::validate() const {
  if (n_honest < 1) throw ConfigError("network needs at least one honest node");
  if (n_honest > n) throw ConfigError("n_honest exceeds n");
  if (!(delta > 0.0) || !std::isfinite(delta)) throw ConfigError("delta must be positive");
}

ParamVector sample_unit_direction(std::size_t d, Rng& rng) {
  if (d == 0) throw ConfigError("dimension must be positive");
  if (d == 1) return {rng.sign()};
  ParamVector u(d);
  double s = 0.0;
  do {
    for (double& x : u) x = rng.normal();
    s = norm_sq(u);
  } while (s == 0.0);
  const double inv = 1.0 / std::sqrt(s);
  for (double& x : u) x *= inv;
  return u;
}

ParamVector sample_honest_noise(std::size_t d, double delta, Rng& rng) {
  if (d == 0) throw ConfigError("dimension must be positive");
  if (!(delta > 0.0)) throw ConfigError("delta must be positive");
  if (d == 1) return {rng.uniform(-delta, delta)};
  ParamVector v = sample_unit_direction(d, rng);
  const double radius = delta * std::pow(rng.uniform01(), 1.0 / static_cast<double>(d));
  for (double& x : v) x *= radius;
  return v;
}

ParamVector sample_adversarial_noise(const AdversaryStrategy& strategy, std::size_t d, Rng& rng) {
  ParamVector v = sample_unit_direction(d, rng);
  for (double& x : v) x *= strategy.magnitude;
  return v;
}

RoundReports make_reports(const ParamVector& grad, const NetworkSpec& net,
                          const AdversaryStrategy& strategy, Rng& rng) {
  const std::size_t d = grad.size();
  RoundReports out;
  out.true_grad = grad;
  out.reports.reserve(net.n);
  for (std::size_t i = 0; i < net.n_honest; ++i) {
    out.reports.push_back(grad + sample_honest_noise(d, net.delta, rng));
  }
  if (net.n_adversarial() > 0) {
    const ParamVector shared = grad + sample_adversarial_noise(strategy, d, rng);
    for (std::size_t j = 0; j < net.n_adversarial(); ++j) out.reports.push_back(shared);
  }
  return out;
}

double max_pairwise_distance(std::span<const ParamVector> reports) {
  double worst = 0.0;
  for (std::size_t u = 0; u < reports.size(); ++u) {
    for (std::size_t v = u + 1; v < reports.size(); ++v) {
      worst = std::max(worst, distance_sq(reports[u], reports[v]));
    }
  }
  return std::sqrt(worst);
}

bool check_acceptance(const RoundReports& reports, double eta, double delta) {
  if (!(eta >= 2.0)) {
    throw PolicyError("acceptance parameter must be at least 2, got " + std::to_string(eta));
  }
  if (!(delta > 0.0)) throw ContractViolation("delta must be positive");
  return max_pairwise_distance(reports.reports) <= eta * delta;
}

}  // namespace vista
