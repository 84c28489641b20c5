#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "vista/diagnostics.hpp"
#include "vista/errors.hpp"

using namespace vista;

namespace {

RoundRecord round_at(std::size_t t, double b, bool accepted, bool saturated) {
  RoundRecord r;
  r.t = t;
  r.b_applied = b;
  r.accepted = accepted;
  r.saturated = saturated;
  if (accepted) r.est_err_sq = 0.0;
  return r;
}

// Every round accepted at eta_min: B_t = b0 / sqrt(t + 1) and tau = u = t + 1.
RunRecord all_saturated(std::size_t T, double b0) {
  RunRecord run;
  run.b0 = b0;
  for (std::size_t t = 0; t < T; ++t) {
    auto r = round_at(t, b0 / std::sqrt(t + 1.0), true, true);
    r.eta_applied = 2.0;
    r.u = r.tau = t + 1;
    r.loss = -static_cast<double>(t);
    run.rounds.push_back(r);
  }
  return run;
}

std::vector<AggregateRow> rows_from(std::size_t T, double (*m)(double)) {
  std::vector<AggregateRow> rows(T);
  for (std::size_t t = 0; t < T; ++t) {
    rows[t].t = t;
    rows[t].mean_gradsq = m(static_cast<double>(t + 1));
  }
  return rows;
}

EquilibriumCurve table(std::vector<double> eta, std::vector<double> pa, std::vector<double> mse,
                       std::vector<double> r) {
  std::vector<EquilibriumPoint> pts(eta.size());
  for (std::size_t i = 0; i < eta.size(); ++i) pts[i] = {eta[i], pa[i], mse[i], r[i], 0, 0, 0};
  return EquilibriumCurve(pts);
}

}  // namespace

TEST_CASE("harmonic bound") {
  RunRecord none;
  for (std::size_t t = 0; t < 100; ++t) none.rounds.push_back(round_at(t, 0.1, t % 2 == 0, false));
  auto rep = check_harmonic_bound(none, 0.1);
  CHECK(rep.sum == 0.0);
  CHECK(rep.bound > 0.0);
  CHECK(rep.ok());

  const auto sat = all_saturated(500, 0.3);
  rep = check_harmonic_bound(sat, 0.3);
  double harmonic = 0;
  for (int k = 1; k <= 500; ++k) harmonic += 1.0 / k;
  CHECK(rep.sum == doctest::Approx(0.09 * harmonic).epsilon(1e-13));
  CHECK(rep.saturated_rounds == 500);
  CHECK(rep.ok());
  CHECK(rep.slack >= 0.0);

  RunRecord bad;
  for (std::size_t t = 0; t < 5; ++t) bad.rounds.push_back(round_at(t, 0.1, true, true));
  rep = check_harmonic_bound(bad, 0.1);
  REQUIRE_FALSE(rep.ok());
  CHECK(*rep.first_violation == 1);
}

TEST_CASE("learning-rate floor") {
  const auto sat = all_saturated(300, 0.1);
  auto rep = check_lr_floor(sat, 0.1);
  CHECK(rep.ok());
  CHECK(rep.min_ratio == doctest::Approx(1.0).epsilon(1e-14));

  RunRecord first;
  first.rounds.push_back(round_at(0, 0.1, false, false));
  CHECK(check_lr_floor(first, 0.1).ok());

  RunRecord bad = sat;
  bad.rounds[7].b_applied *= 0.99;
  rep = check_lr_floor(bad, 0.1);
  REQUIRE_FALSE(rep.ok());
  CHECK(*rep.first_violation == 7);
}

TEST_CASE("counter coupling and frozen rejections") {
  auto run = all_saturated(20, 0.1);
  CHECK(check_counter_coupling(run, 2.0).ok());
  CHECK(check_frozen_on_reject(run).ok());

  auto jump = run;
  for (std::size_t t = 10; t < 20; ++t) jump.rounds[t].u += 1;
  CHECK_FALSE(check_counter_coupling(jump, 2.0).ok());

  auto wrong_eta = run;
  wrong_eta.rounds[3].eta_applied = 2.5;
  CHECK_FALSE(check_counter_coupling(wrong_eta, 2.0).ok());

  auto moved = run;
  moved.rounds[5].accepted = false;
  moved.rounds[5].saturated = false;
  moved.rounds[5].est_err_sq.reset();
  CHECK_FALSE(check_frozen_on_reject(moved).ok());  // loss changed while rejected
  moved.rounds[5].loss = moved.rounds[4].loss;
  CHECK(check_frozen_on_reject(moved).ok());

  auto flag = run;
  flag.rounds[2].est_err_sq.reset();
  CHECK_FALSE(check_frozen_on_reject(flag).ok());
}

TEST_CASE("descent bound algebra") {
  const Objective q = make_quadratic(2);
  const ParamVector w{1.0, -2.0};
  // b = 2 / l: the gradient term vanishes.
  CHECK(descent_bound(q, w, 2.0, 0.7, 3.0) == doctest::Approx(q.value(w) + 2.0 * 0.7 * 3.0));
  CHECK(descent_bound(q, w, 0.5, 1.0, 0.0) == doctest::Approx(2.5 * 0.25));
}

TEST_CASE("descent probe in the noiseless limit") {
  const Objective q = make_quadratic(2);
  const auto curve = table({2, 10}, {1, 1}, {0, 0}, {0, 0});
  const ParamVector w{1.5, -0.5};
  Rng rng(1);
  const auto rep = check_descent_inequality(q, w, 3.0, 0.05, curve, NetworkSpec{3, 3, 1e-9},
                                            EstimatorSpec{}, 100'000, rng);
  const double exact = q.value(w) * (1 - 0.05) * (1 - 0.05);
  CHECK(std::abs(rep.expected_loss - exact) <= 1e-9);
  CHECK(std::abs(rep.bound - exact) <= 1e-9);
  CHECK(rep.holds);
  CHECK(rep.accepted == 100'000);
  CHECK_THROWS_AS(check_descent_inequality(q, w, 3.0, 0.05, curve, NetworkSpec{3, 3, 1e-9},
                                           EstimatorSpec{}, 1000, rng),
                  ContractViolation);
}

TEST_CASE("descent probe with an adversary") {
  const Objective q = make_quadratic(2);
  const NetworkSpec net{2, 1, 1.0};
  SolverConfig cfg;
  cfg.samples = 50'000;
  const auto curve = tabulate_curve(linear_eta_grid(2, 20, 19), AdversaryUtility{0.1}, net,
                                    EstimatorSpec{}, 2, cfg, 3);
  Rng pick(4);
  for (int k = 0; k < 10; ++k) {
    const ParamVector w{pick.uniform(-5, 5), pick.uniform(-5, 5)};
    const double eta = pick.uniform(2, 20);
    const double b = pick.uniform(0.01, 1.0);
    Rng rng(derive_seed(5, StreamTag::probe, {static_cast<std::uint64_t>(k)}));
    const auto rep =
        check_descent_inequality(q, w, eta, b, curve, net, EstimatorSpec{}, 100'000, rng);
    CAPTURE(eta);
    CAPTURE(b);
    CHECK_FALSE(rep.inconclusive);
    CHECK(rep.holds);
  }
}

TEST_CASE("descent probe reports too few acceptances") {
  const Objective q = make_quadratic(1);
  // The curve claims r* = 50 at eta = 2, which is never accepted.
  const auto curve = table({2, 3}, {0.5, 0.5}, {1, 1}, {50, 50});
  Rng rng(6);
  const auto rep = check_descent_inequality(q, {1.0}, 2.0, 0.1, curve, NetworkSpec{2, 1, 1.0},
                                            EstimatorSpec{}, 100'000, rng);
  CHECK(rep.inconclusive);
  CHECK_FALSE(rep.holds);
}

TEST_CASE("rate fit") {
  auto rep = rate_fit(rows_from(4096, [](double) { return 3.0; }));
  CHECK(rep.checkpoints == std::vector<std::size_t>{512, 1024, 2048, 4096});
  // sqrt(T)/ln(T) grows by about 1.27 per doubling here, so a plateau fails.
  CHECK_FALSE(rep.passes);
  CHECK(rep.statistic[1] / rep.statistic[0] ==
        doctest::Approx(std::sqrt(2.0) * std::log(512.0) / std::log(1024.0)));

  rep = rate_fit(rows_from(4096, [](double t) { return 2.0 * std::log(t + 1) / std::sqrt(t + 1); }));
  CHECK(rep.passes);
  CHECK(rep.fitted_constant == doctest::Approx(2.0).epsilon(1e-2));

  rep = rate_fit(rows_from(4096, [](double t) { return std::exp(-t / 50); }));
  CHECK(rep.passes);
  CHECK(rep.running_min[3] <= rep.running_min[0]);

  CHECK_THROWS_AS(rate_fit(rows_from(8, [](double) { return 1.0; })), ContractViolation);
}
