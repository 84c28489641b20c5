#include "vista/objectives.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <utility>

#include "vista/errors.hpp"

namespace vista {

namespace {

// Certified constants, computed offline over each objective's region:
//  synthetic1d: max |L''| = max |2 cos x - x sin x|, x = w/10, on a 2e7-point grid
//               over [-10, 10] gives 8.39239; L* on the same grid is -544.02111.
//  synthetic3d: max Hessian spectral norm on a 161^3 grid over [-50, 50]^3, then
//               polished by bounded local maximization from 3000 random starts,
//               gives 125.008; L* by 3000 bounded local minimizations is -1434.946.
// Stored values are rounded outward.
constexpr double kSynthetic1dSmoothness = 8.4;
constexpr double kSynthetic1dLowerBound = -544.03;
constexpr double kSynthetic1dRadius = 100.0;
constexpr double kSynthetic3dSmoothness = 125.1;
constexpr double kSynthetic3dLowerBound = -1435.0;
constexpr double kSynthetic3dRadius = 50.0;

}  // namespace

Objective::Objective(std::string name, std::size_t dim, ValueFn value, GradFn grad,
                     double smoothness, double lower_bound, double region_radius)
    : name_(std::move(name)),
      dim_(dim),
      value_(std::move(value)),
      grad_(std::move(grad)),
      smoothness_(smoothness),
      lower_bound_(lower_bound),
      region_radius_(region_radius) {
  if (dim_ == 0) throw ConfigError("objective '" + name_ + "' has zero dimension");
  if (!(smoothness_ > 0.0)) throw ConfigError("objective '" + name_ + "' needs smoothness > 0");
}

void Objective::check_dim(std::span<const double> w) const {
  if (w.size() != dim_) {
    throw ConfigError("objective '" + name_ + "' expects dimension " + std::to_string(dim_) +
                      ", got " + std::to_string(w.size()));
  }
}

double Objective::value(std::span<const double> w) const {
  check_dim(w);
  return value_(w);
}

ParamVector Objective::grad(std::span<const double> w) const {
  check_dim(w);
  ParamVector g(dim_, 0.0);
  grad_(w, g);
  return g;
}

bool Objective::in_region(std::span<const double> w) const {
  return max_abs(w) <= region_radius_;
}

Objective make_synthetic1d() {
  return Objective(
      "synthetic1d", 1,
      [](std::span<const double> w) { return 10.0 * w[0] * std::sin(w[0] / 10.0); },
      [](std::span<const double> w, std::span<double> g) {
        g[0] = 10.0 * std::sin(w[0] / 10.0) + w[0] * std::cos(w[0] / 10.0);
      },
      kSynthetic1dSmoothness, kSynthetic1dLowerBound, kSynthetic1dRadius);
}

Objective make_synthetic3d() {
  return Objective(
      "synthetic3d", 3,
      [](std::span<const double> w) {
        return 10.0 * w[0] * std::sin(w[1] / 10.0) + 10.0 * w[1] * std::sin(w[2] / 10.0) +
               10.0 * w[2] * std::sin(w[0] / 2.0);
      },
      [](std::span<const double> w, std::span<double> g) {
        g[0] = 10.0 * std::sin(w[1] / 10.0) + 5.0 * w[2] * std::cos(w[0] / 2.0);
        g[1] = w[0] * std::cos(w[1] / 10.0) + 10.0 * std::sin(w[2] / 10.0);
        g[2] = w[1] * std::cos(w[2] / 10.0) + 10.0 * std::sin(w[0] / 2.0);
      },
      kSynthetic3dSmoothness, kSynthetic3dLowerBound, kSynthetic3dRadius);
}

Objective make_quadratic(std::size_t dim, ParamVector center) {
  if (center.empty()) center.assign(dim, 0.0);
  if (center.size() != dim) throw ConfigError("quadratic center has the wrong dimension");
  return Objective(
      "quadratic_" + std::to_string(dim), dim,
      [center](std::span<const double> w) { return 0.5 * distance_sq(w, center); },
      [center](std::span<const double> w, std::span<double> g) {
        for (std::size_t i = 0; i < w.size(); ++i) g[i] = w[i] - center[i];
      },
      1.0, 0.0, std::numeric_limits<double>::infinity());
}

std::map<std::string, Objective> builtin_objectives() {
  std::map<std::string, Objective> out;
  out.emplace("synthetic1d", make_synthetic1d());
  out.emplace("synthetic3d", make_synthetic3d());
  for (std::size_t d = 1; d <= 3; ++d) {
    Objective q = make_quadratic(d);
    out.emplace(q.name(), std::move(q));
  }
  return out;
}

Objective lookup_objective(const std::string& name) {
  static const std::string prefix = "quadratic_";
  if (name.starts_with(prefix)) {
    std::size_t d = 0;
    const char* first = name.data() + prefix.size();
    const char* last = name.data() + name.size();
    auto [ptr, ec] = std::from_chars(first, last, d);
    if (ec == std::errc() && ptr == last && d >= 1) return make_quadratic(d);
  }
  auto all = builtin_objectives();
  auto it = all.find(name);
  if (it == all.end()) throw ConfigError("unknown objective '" + name + "'");
  return it->second;
}

}  // namespace vista
