#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace vista {

/// Model parameters, gradients, noise realizations and reports all live in R^d.
using ParamVector = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm_sq(std::span<const double> a) { return dot(a, a); }

inline double norm(std::span<const double> a) { return std::sqrt(norm_sq(a)); }

inline double distance_sq(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    s += diff * diff;
  }
  return s;
}

// y += alpha * x
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline ParamVector operator+(const ParamVector& a, const ParamVector& b) {
  ParamVector out(a);
  axpy(1.0, b, out);
  return out;
}

inline ParamVector operator-(const ParamVector& a, const ParamVector& b) {
  ParamVector out(a);
  axpy(-1.0, b, out);
  return out;
}

inline ParamVector scaled(const ParamVector& a, double s) {
  ParamVector out(a);
  for (double& x : out) x *= s;
  return out;
}

inline double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace vista
