#pragma once

// Independent reference computations shared by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "vista/equilibrium.hpp"
#include "vista/rng.hpp"

namespace oracle {

// 1D game with one honest node (uniform on [-1, 1]) and one adversarial node
// at +-r. With V = sign * honest noise, a round is accepted iff V >= r - eta
// and the mean-estimator error is (r + V)^2 / 4. Sorting V once turns every
// (eta, r) query into a binary search plus suffix power sums.
class TwoNodeGame {
 public:
  TwoNodeGame(std::size_t samples, std::uint64_t seed) : v_(samples) {
    vista::Rng rng(seed);
    for (auto& x : v_) x = 2.0 * rng.uniform01() - 1.0;
    std::sort(v_.begin(), v_.end());
    for (auto& s : suffix_) s.assign(samples + 1, 0.0);
    for (std::size_t i = samples; i-- > 0;) {
      double p = 1.0;
      for (int k = 0; k < 5; ++k) {
        suffix_[k][i] = suffix_[k][i + 1] + p;
        p *= v_[i];
      }
    }
  }

  vista::StrategyEstimate evaluate(double eta, double r) const {
    const auto first = std::lower_bound(v_.begin(), v_.end(), r - eta);
    const std::size_t i = static_cast<std::size_t>(first - v_.begin());
    const double n = static_cast<double>(v_.size());
    const double c = suffix_[0][i], s1 = suffix_[1][i], s2 = suffix_[2][i], s3 = suffix_[3][i],
                 s4 = suffix_[4][i];
    vista::StrategyEstimate e;
    e.samples = v_.size();
    e.accepted = static_cast<std::size_t>(c);
    e.pa = c / n;
    e.pa_stderr = std::sqrt(e.pa * (1 - e.pa) / n);
    if (c > 0) {
      const double m1 = (c * r * r + 2 * r * s1 + s2) / 4 / c;
      const double m2 =
          (c * r * r * r * r + 4 * r * r * r * s1 + 6 * r * r * s2 + 4 * r * s3 + s4) / 16 / c;
      e.mse = m1;
      e.mse_stderr = std::sqrt(std::max(0.0, m2 - m1 * m1) / c);
    }
    return e;
  }

  struct Best {
    double r = 0;
    double utility = -std::numeric_limits<double>::infinity();
    vista::StrategyEstimate est;
  };

  // Exhaustive scan of r over [0, eta + 1] at the given step.
  Best argmax(double eta, double lambda, double step) const {
    Best best;
    const vista::AdversaryUtility u{lambda};
    const auto k_max = static_cast<std::size_t>(std::floor((eta + 1) / step + 1e-9));
    for (std::size_t k = 0; k <= k_max; ++k) {
      const double r = step * static_cast<double>(k);
      const auto e = evaluate(eta, r);
      const double val = e.accepted > 0 ? u(e.pa, e.mse) : -std::numeric_limits<double>::infinity();
      if (val > best.utility) best = {r, val, e};
    }
    return best;
  }

 private:
  std::vector<double> v_;
  std::vector<double> suffix_[5];
};

}  // namespace oracle
