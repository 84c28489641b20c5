#include "vista/equilibrium.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "vista/errors.hpp"
#include "vista/isotonic.hpp"

namespace vista {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

void AdversaryUtility::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ConfigError("utility lambda must be positive and finite");
  }
}

double AdversaryUtility::operator()(double pa, double mse) const {
  if (!(pa > 0.0) || !(mse > 0.0)) return kNegInf;
  return std::log(mse) + lambda * std::log(pa);
}

double utility_stderr(const AdversaryUtility& utility, const StrategyEstimate& est) {
  if (!(est.pa > 0.0) || !(est.mse > 0.0)) return std::numeric_limits<double>::infinity();
  const double a = utility.lambda * est.pa_stderr / est.pa;
  const double b = est.mse_stderr / est.mse;
  return std::sqrt(a * a + b * b);
}

StrategySampleBank::StrategySampleBank(const NetworkSpec& net, const EstimatorSpec& est,
                                       std::size_t dim, std::size_t samples, Rng& rng)
    : net_(net), n_honest_(net.n_honest) {
  net.validate();
  if (est.kind != EstimatorKind::mean) {
    throw ContractViolation("sample bank supports the mean estimator only");
  }
  if (dim == 0) throw ConfigError("dimension must be positive");
  honest_spread_sq_.resize(samples);
  honest_norm_sq_.resize(samples * n_honest_);
  honest_dot_dir_.resize(samples * n_honest_);
  sum_norm_sq_.resize(samples);
  sum_dot_dir_.resize(samples);

  std::vector<ParamVector> honest(n_honest_);
  ParamVector sum(dim);
  for (std::size_t k = 0; k < samples; ++k) {
    std::fill(sum.begin(), sum.end(), 0.0);
    for (std::size_t i = 0; i < n_honest_; ++i) {
      honest[i] = sample_honest_noise(dim, net.delta, rng);
      axpy(1.0, honest[i], sum);
    }
    const ParamVector dir = sample_unit_direction(dim, rng);
    double spread = 0.0;
    for (std::size_t i = 0; i < n_honest_; ++i) {
      for (std::size_t j = i + 1; j < n_honest_; ++j) {
        spread = std::max(spread, distance_sq(honest[i], honest[j]));
      }
      honest_norm_sq_[k * n_honest_ + i] = norm_sq(honest[i]);
      honest_dot_dir_[k * n_honest_ + i] = dot(honest[i], dir);
    }
    honest_spread_sq_[k] = spread;
    sum_norm_sq_[k] = norm_sq(sum);
    sum_dot_dir_[k] = dot(sum, dir);
  }
}

StrategyEstimate StrategySampleBank::evaluate(double eta, double r) const {
  const double radius = eta * net_.delta;
  const double radius_sq = radius * radius;
  const double q = static_cast<double>(net_.n_adversarial());
  const double n_sq = static_cast<double>(net_.n) * static_cast<double>(net_.n);
  const bool has_adversary = net_.n_adversarial() > 0;

  std::size_t accepted = 0;
  double err_sum = 0.0;
  double err_sum_sq = 0.0;
  const std::size_t samples = size();
  for (std::size_t k = 0; k < samples; ++k) {
    if (honest_spread_sq_[k] > radius_sq) continue;
    if (has_adversary) {
      bool ok = true;
      const double* hn = &honest_norm_sq_[k * n_honest_];
      const double* hd = &honest_dot_dir_[k * n_honest_];
      for (std::size_t i = 0; i < n_honest_; ++i) {
        const double d_sq = hn[i] - 2.0 * r * hd[i] + r * r;
        if (d_sq > radius_sq) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
    }
    double err = (sum_norm_sq_[k] + 2.0 * q * r * sum_dot_dir_[k] + q * q * r * r) / n_sq;
    err = std::max(err, 0.0);
    ++accepted;
    err_sum += err;
    err_sum_sq += err * err;
  }

  StrategyEstimate out;
  out.samples = samples;
  out.accepted = accepted;
  const double n = static_cast<double>(samples);
  out.pa = static_cast<double>(accepted) / n;
  out.pa_stderr = std::sqrt(out.pa * (1.0 - out.pa) / n);
  if (accepted > 0) {
    const double a = static_cast<double>(accepted);
    out.mse = err_sum / a;
    const double var = accepted > 1 ? std::max(0.0, (err_sum_sq - a * out.mse * out.mse) / (a - 1.0))
                                    : 0.0;
    out.mse_stderr = std::sqrt(var / a);
  }
  return out;
}

StrategyEstimate evaluate_strategy(double eta, double r, const NetworkSpec& net,
                                   const EstimatorSpec& est, std::size_t dim,
                                   std::size_t samples, Rng& rng) {
  if (samples < kMinStrategySamples) {
    throw ContractViolation("evaluate_strategy needs at least 10^4 samples");
  }
  if (!(r >= 0.0) || !std::isfinite(r)) throw ContractViolation("magnitude must be finite, >= 0");
  StrategySampleBank bank(net, est, dim, samples, rng);
  return bank.evaluate(eta, r);
}

EquilibriumPoint best_response(const StrategySampleBank& bank, double eta,
                               const AdversaryUtility& utility, const NetworkSpec& net,
                               const SolverConfig& cfg) {
  if (!(eta >= 2.0)) throw ContractViolation("best_response needs eta >= 2");
  if (cfg.coarse_points < 2) throw ConfigError("solver needs at least 2 coarse points");
  utility.validate();

  const double r_max = (eta + 1.0) * net.delta;
  const double step = r_max / static_cast<double>(cfg.coarse_points - 1);

  double best_r = 0.0;
  double best_u = kNegInf;
  StrategyEstimate best_est;
  std::size_t best_k = 0;
  for (std::size_t k = 0; k < cfg.coarse_points; ++k) {
    const double r = step * static_cast<double>(k);
    const StrategyEstimate e = bank.evaluate(eta, r);
    const double u = e.mse_defined() ? utility(e.pa, e.mse) : kNegInf;
    if (u > best_u) {
      best_u = u;
      best_r = r;
      best_est = e;
      best_k = k;
    }
  }
  if (best_u == kNegInf) {
    throw SolverError("no magnitude with positive acceptance at eta = " + std::to_string(eta));
  }

  // Golden-section refinement on the bracket around the best coarse point.
  if (net.n_adversarial() > 0 && cfg.golden_iterations > 0) {
    double lo = best_k == 0 ? 0.0 : step * static_cast<double>(best_k - 1);
    double hi = std::min(r_max, step * static_cast<double>(best_k + 1));
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    auto eval = [&](double r, StrategyEstimate& e) {
      e = bank.evaluate(eta, r);
      return e.mse_defined() ? utility(e.pa, e.mse) : kNegInf;
    };
    StrategyEstimate e1, e2;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = eval(x1, e1);
    double f2 = eval(x2, e2);
    for (std::size_t it = 0; it < cfg.golden_iterations; ++it) {
      if (f1 >= f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        e2 = e1;
        x1 = hi - inv_phi * (hi - lo);
        f1 = eval(x1, e1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        e1 = e2;
        x2 = lo + inv_phi * (hi - lo);
        f2 = eval(x2, e2);
      }
    }
    // Keep the coarse winner unless refinement strictly improved on it.
    if (f1 > best_u && f1 >= f2) {
      best_u = f1;
      best_r = x1;
      best_est = e1;
    } else if (f2 > best_u) {
      best_u = f2;
      best_r = x2;
      best_est = e2;
    }
  }

  EquilibriumPoint p;
  p.eta = eta;
  p.pa = best_est.pa;
  p.mse = best_est.mse;
  p.r_star = best_r;
  p.mc_samples = best_est.samples;
  p.pa_stderr = best_est.pa_stderr;
  p.mse_stderr = best_est.mse_stderr;
  return p;
}

EquilibriumPoint best_response(double eta, const AdversaryUtility& utility,
                               const NetworkSpec& net, const EstimatorSpec& est,
                               std::size_t dim, const SolverConfig& cfg, Rng& rng) {
  if (cfg.samples < kMinStrategySamples) {
    throw ConfigError("solver needs at least 10^4 samples per evaluation");
  }
  StrategySampleBank bank(net, est, dim, cfg.samples, rng);
  return best_response(bank, eta, utility, net, cfg);
}

EquilibriumCurve::EquilibriumCurve(std::vector<EquilibriumPoint> points)
    : points_(std::move(points)) {
  if (points_.empty()) throw ContractViolation("equilibrium curve needs at least one point");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i].eta) || points_[i].eta < 2.0) {
      throw ContractViolation("curve eta values must be finite and >= 2");
    }
    if (i > 0 && !(points_[i].eta > points_[i - 1].eta)) {
      throw ContractViolation("curve eta values must be strictly increasing");
    }
  }
}

bool operator==(const EquilibriumPoint& a, const EquilibriumPoint& b) {
  return a.eta == b.eta && a.pa == b.pa && a.mse == b.mse && a.r_star == b.r_star &&
         a.pa_stderr == b.pa_stderr && a.mse_stderr == b.mse_stderr;
}

bool EquilibriumCurve::operator==(const EquilibriumCurve& other) const {
  return points_ == other.points_;
}

std::vector<std::string> validate_curve(const EquilibriumCurve& curve) {
  std::vector<std::string> issues;
  const auto& pts = curve.points();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& p = pts[i];
    const std::string at = " at eta = " + std::to_string(p.eta);
    if (!(p.pa > 0.0 && p.pa <= 1.0)) issues.push_back("pa outside (0, 1]" + at);
    if (!(p.mse >= 0.0)) issues.push_back("negative or undefined mse" + at);
    if (i > 0) {
      if (p.pa < pts[i - 1].pa) issues.push_back("pa decreases" + at);
      if (p.mse < pts[i - 1].mse) issues.push_back("mse decreases" + at);
    }
  }
  return issues;
}

std::vector<double> linear_eta_grid(double eta_min, double eta_max, std::size_t points) {
  if (points == 0) throw ConfigError("eta grid needs at least one point");
  if (points == 1) return {eta_min};
  if (!(eta_max > eta_min)) throw ConfigError("eta_max must exceed eta_min");
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = eta_min + (eta_max - eta_min) * static_cast<double>(i) /
                            static_cast<double>(points - 1);
  }
  grid.back() = eta_max;
  return grid;
}

EquilibriumCurve tabulate_curve(std::span<const double> eta_grid, const AdversaryUtility& utility,
                                const NetworkSpec& net, const EstimatorSpec& est,
                                std::size_t dim, const SolverConfig& cfg, std::uint64_t seed,
                                unsigned threads) {
  if (eta_grid.empty()) throw ConfigError("eta grid is empty");
  utility.validate();
  net.validate();
  std::vector<EquilibriumPoint> raw(eta_grid.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < eta_grid.size(); i = next++) {
      try {
        Rng rng(derive_seed(seed, StreamTag::curve_point, {i}));
        raw[i] = best_response(eta_grid[i], utility, net, est, dim, cfg, rng);
      } catch (const std::exception& e) {
        std::lock_guard lock(failure_mutex);
        if (!failure) {
          failure = std::make_exception_ptr(
              SolverError("tabulation failed at eta = " + std::to_string(eta_grid[i]) + ": " +
                          e.what()));
        }
      }
    }
  };
  const unsigned n_threads = std::max(1u, std::min<unsigned>(threads, eta_grid.size()));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<double> pa(raw.size()), mse(raw.size()), rs(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    pa[i] = raw[i].pa;
    mse[i] = raw[i].mse;
    rs[i] = raw[i].r_star;
  }
  pa = isotonic_nondecreasing(pa);
  mse = isotonic_nondecreasing(mse);
  rs = isotonic_nondecreasing(rs);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    raw[i].pa = pa[i];
    raw[i].mse = mse[i];
    raw[i].r_star = rs[i];
  }
  return EquilibriumCurve(std::move(raw));
}

namespace {

template <typename Column>
double interpolate(const EquilibriumCurve& curve, double eta, bool* clamped, Column column) {
  const auto& pts = curve.points();
  bool was_clamped = false;
  if (eta < curve.eta_min() || std::isnan(eta)) {
    eta = curve.eta_min();
    was_clamped = true;
  } else if (eta > curve.eta_max()) {
    eta = curve.eta_max();
    was_clamped = true;
  }
  if (clamped) *clamped = was_clamped;
  auto it = std::lower_bound(pts.begin(), pts.end(), eta,
                             [](const EquilibriumPoint& p, double e) { return p.eta < e; });
  if (it == pts.end()) return column(pts.back());
  if (it->eta == eta || it == pts.begin()) return column(*it);
  const auto& right = *it;
  const auto& left = *(it - 1);
  const double f = (eta - left.eta) / (right.eta - left.eta);
  return column(left) + f * (column(right) - column(left));
}

}  // namespace

double mse_of_eta(const EquilibriumCurve& curve, double eta, bool* clamped) {
  return interpolate(curve, eta, clamped, [](const EquilibriumPoint& p) { return p.mse; });
}

double pa_of_eta(const EquilibriumCurve& curve, double eta, bool* clamped) {
  return interpolate(curve, eta, clamped, [](const EquilibriumPoint& p) { return p.pa; });
}

double r_star_of_eta(const EquilibriumCurve& curve, double eta, bool* clamped) {
  return interpolate(curve, eta, clamped, [](const EquilibriumPoint& p) { return p.r_star; });
}

double eta_for_target_mse(const EquilibriumCurve& curve, double target) {
  const double t = std::min(curve.sigma2_max(), std::max(curve.sigma2_min(), target));
  const auto& pts = curve.points();
  // First grid point whose MSE reaches the target; the infimum lies in the
  // segment ending there.
  auto it = std::partition_point(pts.begin(), pts.end(),
                                 [t](const EquilibriumPoint& p) { return p.mse < t; });
  if (it == pts.begin()) return curve.eta_min();
  if (it == pts.end()) return curve.eta_max();
  double lo = (it - 1)->eta;
  double hi = it->eta;
  while (hi - lo > kEtaSearchTolerance) {
    const double mid = 0.5 * (lo + hi);
    if (mse_of_eta(curve, mid) >= t) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace vista
