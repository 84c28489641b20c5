#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "vista/isotonic.hpp"
#include "vista/rng.hpp"

using namespace vista;

namespace {

// O(n^3) oracle: max over i <= k of min over j >= k of the mean of y[i..j].
std::vector<double> minmax_oracle(const std::vector<double>& y, const std::vector<double>& w) {
  const std::size_t n = y.size();
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    double best = -1e300;
    for (std::size_t i = 0; i <= k; ++i) {
      double worst = 1e300;
      double sy = 0, sw = 0;
      for (std::size_t j = i; j < n; ++j) {
        sy += w[j] * y[j];
        sw += w[j];
        if (j >= k) worst = std::min(worst, sy / sw);
      }
      best = std::max(best, worst);
    }
    out[k] = best;
  }
  return out;
}

}  // namespace

TEST_CASE("already monotone input is unchanged") {
  const std::vector<double> y{1, 2, 2, 5};
  CHECK(isotonic_nondecreasing(y) == y);
  CHECK(isotonic_nondecreasing(std::vector<double>{}).empty());
}

TEST_CASE("violators are pooled") {
  const std::vector<double> y{1, 3, 2, 4};
  CHECK(isotonic_nondecreasing(y) == std::vector<double>{1, 2.5, 2.5, 4});
  const std::vector<double> dec{3, 2, 1};
  CHECK(isotonic_nondecreasing(dec) == std::vector<double>{2, 2, 2});
  const std::vector<double> w{1, 3};
  const std::vector<double> two{4, 0};
  CHECK(isotonic_nondecreasing(two, w)[0] == doctest::Approx(1.0));
}

TEST_CASE("matches the min-max oracle") {
  Rng rng(3);
  for (int k = 0; k < 300; ++k) {
    const std::size_t n = 1 + rng() % 30;
    std::vector<double> y(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = rng.uniform(-1, 1) + 0.05 * static_cast<double>(i);
      w[i] = rng.uniform(0.5, 2);
    }
    const auto got = isotonic_nondecreasing(y, w);
    const auto want = minmax_oracle(y, w);
    for (std::size_t i = 0; i < n; ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
    for (std::size_t i = 1; i < n; ++i) CHECK(got[i - 1] <= got[i]);
  }
}
