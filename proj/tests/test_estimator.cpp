#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "vista/errors.hpp"
#include "vista/estimator.hpp"
#include "vista/rng.hpp"
#include "vista/workers.hpp"

using namespace vista;

TEST_CASE("parse") {
  CHECK(parse_estimator("mean").kind == EstimatorKind::mean);
  CHECK(to_string(EstimatorKind::mean) == "mean");
  CHECK_THROWS_AS(parse_estimator("median"), ConfigError);
}

TEST_CASE("mean examples") {
  const EstimatorSpec mean;
  RoundReports r;
  r.reports = {ParamVector{0.0}, ParamVector{2.0}};
  CHECK(estimate(mean, r) == ParamVector{1.0});
  r.reports.assign(5, ParamVector{1.5, -2.0});
  CHECK(estimate(mean, r) == ParamVector{1.5, -2.0});
  CHECK_THROWS_AS(estimate(mean, RoundReports{}), ContractViolation);
}

TEST_CASE("mean is bit-identical to a direct summation") {
  Rng rng(1);
  const NetworkSpec net{10, 3, 1.0};
  for (int k = 0; k < 200; ++k) {
    const ParamVector g{rng.uniform(-5, 5), rng.uniform(-5, 5)};
    const auto r = make_reports(g, net, {rng.uniform(0, 4)}, rng);
    ParamVector oracle(2, 0.0);
    for (std::size_t j = 0; j < 2; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < r.reports.size(); ++i) s += r.reports[i][j];
      oracle[j] = s / static_cast<double>(r.reports.size());
    }
    CHECK(estimate(EstimatorSpec{}, r) == oracle);
  }
}

TEST_CASE("translation equivariance") {
  // Dyadic values keep every sum exact, so equality is exact too.
  RoundReports r;
  r.reports = {ParamVector{0.5, 1.25}, ParamVector{-3.0, 2.0}, ParamVector{0.75, -0.5},
               ParamVector{1.0, 1.0}};
  const ParamVector c{8.0, -16.0};
  RoundReports shifted = r;
  for (auto& y : shifted.reports) y = y + c;
  CHECK(estimate(EstimatorSpec{}, shifted) == estimate(EstimatorSpec{}, r) + c);
}

TEST_CASE("conditionally unbiased on accepted rounds") {
  Rng rng(2);
  const NetworkSpec net{3, 1, 1.0};
  const ParamVector g{0.3, -1.2};
  const double eta = 3.0;
  const AdversaryStrategy strat{2.5};
  std::size_t accepted = 0;
  ParamVector sum(2, 0.0), sum_sq(2, 0.0);
  while (accepted < 1'000'000) {
    const auto r = make_reports(g, net, strat, rng);
    if (!check_acceptance(r, eta, net.delta)) continue;
    ++accepted;
    const ParamVector e = estimate(EstimatorSpec{}, r) - g;
    for (int j = 0; j < 2; ++j) {
      sum[j] += e[j];
      sum_sq[j] += e[j] * e[j];
    }
  }
  for (int j = 0; j < 2; ++j) {
    const double n = static_cast<double>(accepted);
    const double mean = sum[j] / n;
    const double se = std::sqrt((sum_sq[j] / n - mean * mean) / n);
    CHECK(std::abs(mean) <= 4 * se);
  }
}
