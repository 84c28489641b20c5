#include "vista/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <mutex>
#include <numeric>
#include <thread>

#include "vista/controller.hpp"
#include "vista/errors.hpp"
#include "vista/estimator.hpp"
#include "vista/workers.hpp"

namespace vista {

std::uint64_t run_seed(std::uint64_t master, std::size_t run_index) {
  return derive_seed(master, StreamTag::run, {run_index});
}

std::shared_ptr<const EquilibriumCurve> resolve_curve(const ExperimentConfig& config) {
  const CurveSpec& spec = config.curve;
  if (spec.path && std::filesystem::exists(*spec.path)) {
    return std::make_shared<const EquilibriumCurve>(load_curve(*spec.path));
  }
  const auto grid = linear_eta_grid(spec.eta_min, spec.eta_max, spec.points);
  auto curve = std::make_shared<const EquilibriumCurve>(
      tabulate_curve(grid, config.utility, config.network, config.estimator, config.dim(),
                     spec.solver, spec.seed, config.run.threads));
  if (spec.path) save_curve(*curve, *spec.path);
  return curve;
}

RunRecord run_single(const ExperimentConfig& config, const Objective& objective,
                     std::shared_ptr<const EquilibriumCurve> curve, std::uint64_t seed) {
  if (!curve) throw ContractViolation("run_single needs an equilibrium curve");
  if (objective.dim() != config.w_init.size()) {
    throw ConfigError("w_init dimension does not match the objective");
  }
  const NetworkSpec& net = config.network;
  Controller controller(config.policy, curve, config.w_init);

  RunRecord run;
  run.seed = seed;
  run.b0 = config.policy.b0();
  if (controller.needs_oracle()) {
    run.warnings = validate_vista_config(config.policy.vista, *curve, objective.smoothness());
  }
  run.rounds.reserve(config.run.horizon);

  GradNormOracle oracle;
  if (controller.needs_oracle()) {
    oracle = [&objective](const ParamVector& w) { return norm_sq(objective.grad(w)); };
  }

  double loss = objective.value(controller.state().w);
  std::size_t accepted_total = 0;
  for (std::size_t t = 0; t < config.run.horizon; ++t) {
    RoundRecord rec;
    rec.t = t;
    rec.eta_applied = controller.eta();
    rec.b_applied = controller.learning_rate();

    const ParamVector grad = objective.grad(controller.state().w);
    rec.grad_norm_sq = norm_sq(grad);

    bool clamped = false;
    rec.r_star_applied = r_star_of_eta(*curve, rec.eta_applied, &clamped);
    if (clamped) ++run.clamped_lookups;

    Rng rng(derive_seed(seed, StreamTag::round_reports, {t}));
    const RoundReports reports =
        make_reports(grad, net, AdversaryStrategy{rec.r_star_applied}, rng);
    rec.accepted = check_acceptance(reports, rec.eta_applied, net.delta);

    if (rec.accepted) {
      const ParamVector g_hat = estimate(config.estimator, reports);
      rec.est_err_sq = distance_sq(g_hat, grad);
      const AcceptOutcome out = controller.accept(g_hat, oracle);
      rec.saturated = out.saturated;
      rec.b_applied = out.b_applied;
      loss = objective.value(controller.state().w);
      ++accepted_total;
      if (!run.left_region && !objective.in_region(controller.state().w)) {
        run.left_region = true;
        run.warnings.push_back("trajectory left the certified region at round " +
                               std::to_string(t));
      }
    } else {
      controller.reject();
    }
    rec.loss = loss;
    rec.u = controller.state().u;
    rec.tau = controller.state().tau;
    if (rec.saturated && !run.summary.saturation_entry_round) {
      run.summary.saturation_entry_round = t;
    }
    run.rounds.push_back(rec);
  }
  if (run.clamped_lookups > 0) {
    run.warnings.push_back(std::to_string(run.clamped_lookups) +
                           " threshold lookups fell outside the curve and were clamped");
  }

  run.final_w = controller.state().w;
  run.summary.final_loss = loss;
  run.summary.acceptance_rate =
      static_cast<double>(accepted_total) / static_cast<double>(config.run.horizon);
  run.summary.min_grad_norm_sq = run.rounds.front().grad_norm_sq;
  for (const auto& r : run.rounds) {
    run.summary.min_grad_norm_sq = std::min(run.summary.min_grad_norm_sq, r.grad_norm_sq);
  }
  return run;
}

RunRecord run_single(const ExperimentConfig& config, std::uint64_t seed) {
  return run_single(config, lookup_objective(config.objective), resolve_curve(config), seed);
}

namespace {

struct Moments {
  double mean = 0.0;
  double sd = 0.0;
};

template <typename Get>
Moments moments(std::span<const RunRecord> runs, Get get) {
  const double n = static_cast<double>(runs.size());
  double sum = 0.0;
  for (const auto& r : runs) sum += get(r);
  Moments m;
  m.mean = sum / n;
  if (runs.size() > 1) {
    double ss = 0.0;
    for (const auto& r : runs) {
      const double d = get(r) - m.mean;
      ss += d * d;
    }
    m.sd = std::sqrt(ss / (n - 1.0));
  }
  return m;
}

std::vector<double> trailing_average(const std::vector<double>& x, std::size_t window) {
  std::vector<double> out(x.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sum += x[i];
    if (i >= window) sum -= x[i - window];
    out[i] = sum / static_cast<double>(std::min(window, i + 1));
  }
  return out;
}

}  // namespace

Aggregate aggregate_runs(std::span<const RunRecord> runs, std::size_t stride,
                         std::size_t ma_window) {
  if (runs.empty()) throw ContractViolation("aggregate_runs needs at least one run");
  if (stride == 0) throw ContractViolation("stride must be positive");
  const std::size_t horizon = runs.front().rounds.size();
  for (const auto& r : runs) {
    if (r.rounds.size() != horizon) throw ContractViolation("runs differ in length");
  }

  Aggregate agg;
  agg.runs = runs.size();
  auto row_at = [&](std::size_t t, auto loss_of, auto gradsq_of) {
    AggregateRow row;
    row.t = t;
    const Moments loss = moments(runs, loss_of);
    const Moments gsq = moments(runs, gradsq_of);
    row.mean_loss = loss.mean;
    row.std_loss = loss.sd;
    row.mean_gradsq = gsq.mean;
    row.std_gradsq = gsq.sd;
    row.mean_eta = moments(runs, [t](const RunRecord& r) { return r.rounds[t].eta_applied; }).mean;
    row.accept_rate =
        moments(runs, [t](const RunRecord& r) { return r.rounds[t].accepted ? 1.0 : 0.0; }).mean;
    row.saturate_rate =
        moments(runs, [t](const RunRecord& r) { return r.rounds[t].saturated ? 1.0 : 0.0; }).mean;
    row.mean_b = moments(runs, [t](const RunRecord& r) { return r.rounds[t].b_applied; }).mean;
    return row;
  };

  for (std::size_t t = 0; t < horizon; t += stride) {
    agg.rows.push_back(row_at(
        t, [t](const RunRecord& r) { return r.rounds[t].loss; },
        [t](const RunRecord& r) { return r.rounds[t].grad_norm_sq; }));
  }

  if (ma_window > 1) {
    std::vector<std::vector<double>> loss_ma(runs.size()), gsq_ma(runs.size());
    for (std::size_t k = 0; k < runs.size(); ++k) {
      std::vector<double> l(horizon), g(horizon);
      for (std::size_t t = 0; t < horizon; ++t) {
        l[t] = runs[k].rounds[t].loss;
        g[t] = runs[k].rounds[t].grad_norm_sq;
      }
      loss_ma[k] = trailing_average(l, ma_window);
      gsq_ma[k] = trailing_average(g, ma_window);
    }
    auto index_of = [&](const RunRecord& r) {
      return static_cast<std::size_t>(&r - runs.data());
    };
    for (std::size_t t = 0; t < horizon; t += stride) {
      agg.moving_average_rows.push_back(row_at(
          t, [&, t](const RunRecord& r) { return loss_ma[index_of(r)][t]; },
          [&, t](const RunRecord& r) { return gsq_ma[index_of(r)][t]; }));
    }
  }
  return agg;
}

BatchResult run_batch(const ExperimentConfig& config,
                      std::shared_ptr<const EquilibriumCurve> curve) {
  config.validate();
  BatchResult batch;
  batch.config = config;
  batch.curve = curve ? std::move(curve) : resolve_curve(config);
  const Objective objective = lookup_objective(config.objective);

  batch.runs.resize(config.run.runs);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < config.run.runs; i = next++) {
      try {
        batch.runs[i] =
            run_single(config, objective, batch.curve, run_seed(config.run.master_seed, i));
        batch.runs[i].run_index = i;
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned threads =
      std::max(1u, std::min<unsigned>(config.run.threads, static_cast<unsigned>(config.run.runs)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  batch.aggregate = aggregate_runs(batch.runs, config.run.record_stride, config.run.ma_window);
  return batch;
}

void check_comparable(std::span<const ExperimentConfig> configs) {
  if (configs.empty()) throw ConfigError("compare needs at least one config");
  const ExperimentConfig& ref = configs.front();
  for (const auto& c : configs.subspan(1)) {
    if (c.objective != ref.objective || c.w_init != ref.w_init) {
      throw ConfigError("compared configs must share the objective and w_init");
    }
    if (c.network.n != ref.network.n || c.network.n_honest != ref.network.n_honest ||
        c.network.delta != ref.network.delta) {
      throw ConfigError("compared configs must share the network");
    }
    if (c.utility.lambda != ref.utility.lambda) {
      throw ConfigError("compared configs must share the adversary utility");
    }
    if (c.run.horizon != ref.run.horizon) throw ConfigError("compared configs must share T");
  }
}

ComparisonTable compare(std::span<const BatchResult> batches) {
  std::vector<ExperimentConfig> configs;
  for (const auto& b : batches) configs.push_back(b.config);
  check_comparable(configs);

  ComparisonTable table;
  for (const auto& b : batches) {
    table.labels.push_back(b.label());
    table.columns.push_back(&b.aggregate);
  }
  table.ranking.resize(batches.size());
  std::iota(table.ranking.begin(), table.ranking.end(), 0);
  std::stable_sort(table.ranking.begin(), table.ranking.end(), [&](std::size_t a, std::size_t b) {
    return table.columns[a]->rows.back().mean_gradsq < table.columns[b]->rows.back().mean_gradsq;
  });
  return table;
}

}  // namespace vista
