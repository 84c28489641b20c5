#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "vista/estimator.hpp"
#include "vista/rng.hpp"
#include "vista/workers.hpp"

namespace vista {

/// U_AD = log(MSE) + lambda * log(PA).
struct AdversaryUtility {
  double lambda = 0.1;

  void validate() const;  // lambda > 0, finite

  /// -inf when pa == 0 or mse is undefined.
  double operator()(double pa, double mse) const;
};

/// Monte Carlo estimate of (PA, MSE) for one (eta, r) pair. MSE is
/// conditional on acceptance and undefined when nothing was accepted.
struct StrategyEstimate {
  double pa = 0.0;
  double mse = 0.0;
  double pa_stderr = 0.0;
  double mse_stderr = 0.0;
  std::size_t samples = 0;
  std::size_t accepted = 0;

  bool mse_defined() const { return accepted > 0; }
};

/// Delta-method standard error of the utility estimate.
double utility_stderr(const AdversaryUtility& utility, const StrategyEstimate& est);

/// Pre-drawn noise for a fixed population so that many magnitudes r can be
/// scored on common random numbers. Reports are sampled at grad = 0; the
/// acceptance test and the mean estimator are translation equivariant, so
/// nothing is lost.
///
/// For each sample the bank keeps only what the acceptance test and the
/// mean-estimator error need as a function of r:
///   ||h_i - r u||^2 = ||h_i||^2 - 2 r <h_i, u> + r^2
///   ||mean||^2      = (||S||^2 + 2 q r <S, u> + q^2 r^2) / n^2
/// with S the honest noise sum and q the adversarial node count.
class StrategySampleBank {
 public:
  StrategySampleBank(const NetworkSpec& net, const EstimatorSpec& est, std::size_t dim,
                     std::size_t samples, Rng& rng);

  StrategyEstimate evaluate(double eta, double r) const;
  std::size_t size() const { return honest_spread_sq_.size(); }

 private:
  NetworkSpec net_;
  std::size_t n_honest_;
  std::vector<double> honest_spread_sq_;  // max pairwise honest distance^2, per sample
  std::vector<double> honest_norm_sq_;    // [sample * n_honest + i]
  std::vector<double> honest_dot_dir_;    // [sample * n_honest + i]
  std::vector<double> sum_norm_sq_;
  std::vector<double> sum_dot_dir_;
};

inline constexpr std::size_t kMinStrategySamples = 10'000;

StrategyEstimate evaluate_strategy(double eta, double r, const NetworkSpec& net,
                                   const EstimatorSpec& est, std::size_t dim,
                                   std::size_t samples, Rng& rng);

struct SolverConfig {
  std::size_t coarse_points = 128;
  std::size_t samples = 100'000;
  std::size_t golden_iterations = 40;
};

struct EquilibriumPoint {
  double eta = 2.0;
  double pa = 1.0;
  double mse = 0.0;
  double r_star = 0.0;
  std::size_t mc_samples = 0;
  double pa_stderr = 0.0;
  double mse_stderr = 0.0;
};

/// Best magnitude on the grid r_k = k (eta + 1) delta / (coarse_points - 1),
/// refined by golden-section search between the neighbours of the best grid
/// point. All candidates share one sample bank.
EquilibriumPoint best_response(double eta, const AdversaryUtility& utility,
                               const NetworkSpec& net, const EstimatorSpec& est,
                               std::size_t dim, const SolverConfig& cfg, Rng& rng);

EquilibriumPoint best_response(const StrategySampleBank& bank, double eta,
                               const AdversaryUtility& utility, const NetworkSpec& net,
                               const SolverConfig& cfg);

/// Tabulated equilibrium map eta -> (p, sigma^2, r*), sorted by eta.
class EquilibriumCurve {
 public:
  EquilibriumCurve() = default;
  explicit EquilibriumCurve(std::vector<EquilibriumPoint> points);

  const std::vector<EquilibriumPoint>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }

  double eta_min() const { return points_.front().eta; }
  double eta_max() const { return points_.back().eta; }
  double sigma2_min() const { return points_.front().mse; }
  double sigma2_max() const { return points_.back().mse; }
  double p_min() const { return points_.front().pa; }
  double p_max() const { return points_.back().pa; }

  bool operator==(const EquilibriumCurve&) const;

 private:
  std::vector<EquilibriumPoint> points_;
};

bool operator==(const EquilibriumPoint& a, const EquilibriumPoint& b);

/// Human-readable invariant violations (non-monotone columns, pa outside (0, 1], ...).
std::vector<std::string> validate_curve(const EquilibriumCurve& curve);

std::vector<double> linear_eta_grid(double eta_min, double eta_max, std::size_t points);

/// best_response at every grid point, then an isotonic projection of the
/// pa, mse and r* columns. Point i draws from derive_seed(seed, curve_point, {i}),
/// so the result does not depend on `threads`.
EquilibriumCurve tabulate_curve(std::span<const double> eta_grid, const AdversaryUtility& utility,
                                const NetworkSpec& net, const EstimatorSpec& est,
                                std::size_t dim, const SolverConfig& cfg, std::uint64_t seed,
                                unsigned threads = 1);

/// Piecewise-linear lookups, exact at grid points. Out-of-range eta is
/// clamped and reported through `clamped`.
double mse_of_eta(const EquilibriumCurve& curve, double eta, bool* clamped = nullptr);
double pa_of_eta(const EquilibriumCurve& curve, double eta, bool* clamped = nullptr);
double r_star_of_eta(const EquilibriumCurve& curve, double eta, bool* clamped = nullptr);

inline constexpr double kEtaSearchTolerance = 1e-6;

/// Smallest eta whose interpolated MSE reaches the clamped target
/// min(sigma2_max, max(sigma2_min, target)).
double eta_for_target_mse(const EquilibriumCurve& curve, double target);

// Curve cache file: CSV with header eta,pa,mse,r_star,pa_stderr,mse_stderr
// and 17 significant digits per value.
void write_curve(const EquilibriumCurve& curve, std::ostream& out);
EquilibriumCurve read_curve(std::istream& in);
void save_curve(const EquilibriumCurve& curve, const std::filesystem::path& path);
EquilibriumCurve load_curve(const std::filesystem::path& path);

}  // namespace vista
