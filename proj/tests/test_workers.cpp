#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "vista/errors.hpp"
#include "vista/rng.hpp"
#include "vista/workers.hpp"

using namespace vista;

namespace {

RoundReports from_values(std::initializer_list<double> xs) {
  RoundReports r;
  for (double x : xs) r.reports.push_back(ParamVector{x});
  r.true_grad = ParamVector{0.0};
  return r;
}

bool brute_accept(const std::vector<ParamVector>& ys, double eta, double delta) {
  for (std::size_t a = 0; a < ys.size(); ++a)
    for (std::size_t b = 0; b < ys.size(); ++b)
      if (std::sqrt(distance_sq(ys[a], ys[b])) > eta * delta) return false;
  return true;
}

}  // namespace

TEST_CASE("network spec validation") {
  NetworkSpec ok{10, 1, 1.0};
  CHECK(ok.n_adversarial() == 9);
  CHECK_NOTHROW(ok.validate());
  CHECK_THROWS_AS((NetworkSpec{3, 0, 1.0}.validate()), ConfigError);
  CHECK_THROWS_AS((NetworkSpec{2, 3, 1.0}.validate()), ConfigError);
  CHECK_THROWS_AS((NetworkSpec{2, 1, 0.0}.validate()), ConfigError);
}

TEST_CASE("honest noise support and moments") {
  Rng rng(1);
  CHECK_THROWS_AS(sample_honest_noise(0, 1.0, rng), ConfigError);
  CHECK_THROWS_AS(sample_honest_noise(1, 0.0, rng), ConfigError);

  const int N = 1'000'000;
  double sum = 0;
  for (int i = 0; i < N; ++i) {
    const double x = sample_honest_noise(1, 1.0, rng)[0];
    REQUIRE(std::abs(x) <= 1.0);
    sum += x;
  }
  CHECK(std::abs(sum / N) <= 3 * (1.0 / std::sqrt(3.0)) / 1e3);

  double sq = 0;
  for (int i = 0; i < N; ++i) {
    const ParamVector v = sample_honest_noise(3, 2.0, rng);
    REQUIRE(norm(v) <= 2.0);
    sq += norm_sq(v);
  }
  const double expected = 3.0 / 5.0 * 4.0;
  CHECK(std::abs(sq / N - expected) <= 0.01 * expected);
}

TEST_CASE("adversarial noise") {
  Rng rng(2);
  CHECK(sample_adversarial_noise({0.0}, 3, rng) == ParamVector{0, 0, 0});
  int plus = 0;
  const int N = 100'000;
  for (int i = 0; i < N; ++i) {
    const double x = sample_adversarial_noise({2.0}, 1, rng)[0];
    REQUIRE((x == 2.0 || x == -2.0));
    plus += x > 0;
  }
  CHECK(std::abs(static_cast<double>(plus) / N - 0.5) <= 0.005);
  ParamVector mean(3, 0.0);
  for (int i = 0; i < N; ++i) {
    const ParamVector v = sample_adversarial_noise({1.0}, 3, rng);
    REQUIRE(norm(v) == doctest::Approx(1.0).epsilon(1e-15));
    axpy(1.0 / N, v, mean);
  }
  CHECK(max_abs(mean) < 4.0 / std::sqrt(3.0 * N));
}

TEST_CASE("make_reports layout") {
  Rng rng(3);
  const ParamVector g{0.25};
  {
    const NetworkSpec net{4, 4, 1e-12};
    const auto r = make_reports(g, net, {0.0}, rng);
    for (const auto& y : r.reports) CHECK(std::abs(y[0] - g[0]) <= 1e-12);
  }
  {
    const NetworkSpec net{2, 1, 1.0};
    for (int i = 0; i < 1000; ++i) {
      const auto r = make_reports(g, net, {1.7}, rng);
      REQUIRE(r.reports.size() == 2);
      CHECK(std::abs(r.reports[0][0] - g[0]) <= 1.0);
      CHECK(std::abs(r.reports[1][0] - g[0]) == doctest::Approx(1.7));
      CHECK(r.true_grad == g);
    }
  }
  {
    const NetworkSpec net{10, 1, 1.0};
    const auto r = make_reports(ParamVector{1, 2, 3}, net, {2.0}, rng);
    for (std::size_t i = 2; i < 10; ++i) CHECK(r.reports[i] == r.reports[1]);
  }
}

TEST_CASE("acceptance examples") {
  CHECK(check_acceptance(from_values({1, 1, 1}), 2.0, 1.0));
  CHECK_FALSE(check_acceptance(from_values({0, 3}), 2.0, 1.0));
  CHECK_FALSE(check_acceptance(from_values({0, 1.5, 3}), 2.0, 1.0));
  CHECK(check_acceptance(from_values({0, 2}), 2.0, 1.0));  // tie accepts
  CHECK_THROWS_AS(check_acceptance(from_values({0, 0}), 1.999, 1.0), PolicyError);
  CHECK(max_pairwise_distance(from_values({0, 1.5, 3}).reports) == 3.0);
}

TEST_CASE("acceptance matches brute force and is symmetric") {
  Rng rng(4);
  for (int k = 0; k < 2000; ++k) {
    const std::size_t n = 2 + rng() % 15;
    const std::size_t d = 1 + rng() % 3;
    RoundReports r;
    for (std::size_t i = 0; i < n; ++i) {
      ParamVector y(d);
      for (auto& x : y) x = rng.uniform(-2, 2);
      r.reports.push_back(y);
    }
    const double eta = rng.uniform(2, 6);
    const bool got = check_acceptance(r, eta, 1.0);
    CHECK(got == brute_accept(r.reports, eta, 1.0));
    RoundReports neg = r;
    for (auto& y : neg.reports)
      for (auto& x : y) x = -x;
    CHECK(check_acceptance(neg, eta, 1.0) == got);
  }
}

TEST_CASE("honest-only 1D rounds always pass at eta = 2") {
  Rng rng(5);
  const NetworkSpec net{8, 8, 1.0};
  for (int k = 0; k < 10000; ++k) {
    CHECK(check_acceptance(make_reports(ParamVector{3.0}, net, {0.0}, rng), 2.0, 1.0));
  }
}

TEST_CASE("rng streams") {
  Rng a(derive_seed(9, StreamTag::run, {1}));
  Rng b(derive_seed(9, StreamTag::run, {1}));
  Rng c(derive_seed(9, StreamTag::run, {2}));
  const auto x = a();
  CHECK(x == b());
  CHECK(x != c());
  CHECK(derive_seed(9, StreamTag::run, {1}) != derive_seed(9, StreamTag::probe, {1}));
  Rng u(11);
  for (int i = 0; i < 1000; ++i) {
    const double v = u.uniform01();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }
}
