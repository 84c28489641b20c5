#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>

#include "vista/vector_ops.hpp"

namespace vista {

/// A smooth objective with an exact gradient.
///
/// `smoothness` (the gradient Lipschitz constant) and `lower_bound` are
/// certified only on the box ||w||_inf <= region_radius; for the quadratic
/// family they hold globally and region_radius is +inf.
class Objective {
 public:
  using ValueFn = std::function<double(std::span<const double>)>;
  using GradFn = std::function<void(std::span<const double>, std::span<double>)>;

  Objective(std::string name, std::size_t dim, ValueFn value, GradFn grad, double smoothness,
            double lower_bound, double region_radius);

  const std::string& name() const { return name_; }
  std::size_t dim() const { return dim_; }
  double smoothness() const { return smoothness_; }
  double lower_bound() const { return lower_bound_; }
  double region_radius() const { return region_radius_; }

  double value(std::span<const double> w) const;
  ParamVector grad(std::span<const double> w) const;
  bool in_region(std::span<const double> w) const;

 private:
  void check_dim(std::span<const double> w) const;

  std::string name_;
  std::size_t dim_;
  ValueFn value_;
  GradFn grad_;
  double smoothness_;
  double lower_bound_;
  double region_radius_;
};

/// L(w) = 10 w sin(w/10) on [-100, 100].
Objective make_synthetic1d();

/// L(w) = 10 w1 sin(w2/10) + 10 w2 sin(w3/10) + 10 w3 sin(w1/2) on [-50, 50]^3.
Objective make_synthetic3d();

/// L(w) = 0.5 ||w - center||^2; smoothness 1 and lower bound 0 exactly.
/// An empty center means the origin.
Objective make_quadratic(std::size_t dim, ParamVector center = {});

/// Named objectives: "synthetic1d", "synthetic3d", and "quadratic_1".."quadratic_3".
std::map<std::string, Objective> builtin_objectives();

/// Resolves a name from builtin_objectives(), plus "quadratic_<d>" for any d >= 1.
/// Throws ConfigError for unknown names.
Objective lookup_objective(const std::string& name);

}  // namespace vista
