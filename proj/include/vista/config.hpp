#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "vista/controller.hpp"
#include "vista/equilibrium.hpp"
#include "vista/estimator.hpp"
#include "vista/workers.hpp"

namespace vista {

/// Where the equilibrium curve comes from: a cache file, an inline
/// tabulation spec, or both (tabulate once, then reuse the file).
struct CurveSpec {
  std::optional<std::filesystem::path> path;
  double eta_min = 2.0;
  double eta_max = 60.0;
  std::size_t points = 59;
  SolverConfig solver;
  std::uint64_t seed = 1;
};

struct RunSpec {
  std::size_t horizon = 2000;  // T
  std::size_t runs = 1;
  std::uint64_t master_seed = 0;
  unsigned threads = 1;
  std::filesystem::path output = "results";
  std::size_t ma_window = 0;  // 0 or 1 disables the moving-average output
  std::size_t record_stride = 1;
  bool trace = false;  // per-run round traces for `check`
};

struct ExperimentConfig {
  std::string objective = "synthetic1d";
  ParamVector w_init;
  NetworkSpec network;
  EstimatorSpec estimator;
  AdversaryUtility utility;
  PolicySpec policy;
  CurveSpec curve;
  RunSpec run;

  /// Objective dimension; w_init must match it.
  std::size_t dim() const { return w_init.size(); }
  void validate() const;  // throws ConfigError
};

/// Parses the INI-style config:
///
///   [objective] name, w_init
///   [network]   n, n_honest, delta, estimator
///   [utility]   kind, lambda
///   [policy]    kind, b0, c, beta, eta0, eta_fixed, label
///   [curve]     path, eta_min, eta_max, points, samples, coarse_points,
///               golden_iterations, seed
///   [run]       T, runs, seed, threads, output, ma_window, record_stride, trace
///
/// Unknown sections or keys are errors. Relative paths resolve against
/// `base_dir`.
ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace vista
