// Command-line front end: tabulate-curve, run, compare, check.

#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "vista/config.hpp"
#include "vista/diagnostics.hpp"
#include "vista/equilibrium.hpp"
#include "vista/errors.hpp"
#include "vista/harness.hpp"
#include "vista/results_io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInvariant = 3;

using nlohmann::ordered_json;

// Pathwise checks over every run; returns the JSON verdict and whether all passed.
std::pair<ordered_json, bool> pathwise_verdict(const std::vector<vista::RunRecord>& runs,
                                               double eta_min) {
  std::size_t harmonic_bad = 0, floor_bad = 0, coupling_bad = 0, frozen_bad = 0;
  double min_harmonic_slack = std::numeric_limits<double>::infinity();
  ordered_json first_failures = ordered_json::array();
  for (const auto& run : runs) {
    const auto h = vista::check_harmonic_bound(run, run.b0);
    const auto f = vista::check_lr_floor(run, run.b0);
    const auto c = vista::check_counter_coupling(run, eta_min);
    const auto z = vista::check_frozen_on_reject(run);
    min_harmonic_slack = std::min(min_harmonic_slack, h.min_prefix_slack);
    harmonic_bad += !h.ok();
    floor_bad += !f.ok();
    coupling_bad += !c.ok();
    frozen_bad += !z.ok();
    if (first_failures.size() < 10) {
      if (!h.ok()) {
        first_failures.push_back({{"run", run.run_index},
                                  {"check", "harmonic_bound"},
                                  {"first_offending_prefix", *h.first_violation}});
      }
      if (!f.ok()) {
        first_failures.push_back({{"run", run.run_index},
                                  {"check", "lr_floor"},
                                  {"round", *f.first_violation}});
      }
      for (const auto& v : c.violations) {
        first_failures.push_back({{"run", run.run_index}, {"check", "counter_coupling"}, {"detail", v}});
      }
      for (const auto& v : z.violations) {
        first_failures.push_back({{"run", run.run_index}, {"check", "frozen_on_reject"}, {"detail", v}});
      }
    }
  }
  ordered_json j;
  j["runs"] = runs.size();
  j["harmonic_bound"] = {{"pass", harmonic_bad == 0},
                         {"violating_runs", harmonic_bad},
                         {"min_prefix_slack", min_harmonic_slack}};
  j["lr_floor"] = {{"pass", floor_bad == 0}, {"violating_runs", floor_bad}};
  j["counter_coupling"] = {{"pass", coupling_bad == 0}, {"violating_runs", coupling_bad}};
  j["frozen_on_reject"] = {{"pass", frozen_bad == 0}, {"violating_runs", frozen_bad}};
  if (!first_failures.empty()) j["failures"] = first_failures;
  return {j, harmonic_bad + floor_bad + coupling_bad + frozen_bad == 0};
}

vista::ExperimentConfig load_with_overrides(const std::string& path,
                                            std::optional<std::uint64_t> seed,
                                            std::optional<std::size_t> runs,
                                            std::optional<unsigned> threads) {
  vista::ExperimentConfig cfg = vista::load_config(path);
  if (seed) cfg.run.master_seed = *seed;
  if (runs) cfg.run.runs = *runs;
  if (threads) cfg.run.threads = *threads;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive acceptance-threshold optimization under rational adversaries"};
  app.require_subcommand(1);

  // tabulate-curve
  auto* tab = app.add_subcommand("tabulate-curve", "Tabulate the equilibrium curve for a config");
  std::string tab_config, tab_out;
  std::optional<std::uint64_t> tab_seed;
  std::optional<unsigned> tab_threads;
  tab->add_option("--config", tab_config, "Experiment config")->required();
  tab->add_option("--out", tab_out, "Output curve CSV")->required();
  tab->add_option("--seed", tab_seed, "Curve seed (overrides [curve] seed)");
  tab->add_option("--threads", tab_threads, "Worker threads");

  // run
  auto* run = app.add_subcommand("run", "Run a multi-seed batch for one policy");
  std::string run_config, run_out;
  std::optional<std::uint64_t> run_seed_opt;
  std::optional<std::size_t> run_runs;
  std::optional<unsigned> run_threads;
  bool run_strict = false, run_trace = false;
  run->add_option("--config", run_config, "Experiment config")->required();
  run->add_option("--out", run_out, "Output directory (default: [run] output)");
  run->add_option("--seed", run_seed_opt, "Master seed");
  run->add_option("--runs", run_runs, "Number of runs");
  run->add_option("--threads", run_threads, "Worker threads");
  run->add_flag("--strict", run_strict, "Exit 3 when a pathwise invariant fails");
  run->add_flag("--trace", run_trace, "Also write per-run round traces");

  // compare
  auto* cmp = app.add_subcommand("compare", "Run several policies and rank them");
  std::vector<std::string> cmp_configs;
  std::string cmp_out;
  std::optional<unsigned> cmp_threads;
  bool cmp_strict = false;
  cmp->add_option("--configs", cmp_configs, "Experiment configs")->required()->expected(1, -1);
  cmp->add_option("--out", cmp_out, "Output directory")->required();
  cmp->add_option("--threads", cmp_threads, "Worker threads");
  cmp->add_flag("--strict", cmp_strict, "Exit 3 when a pathwise invariant fails");

  // check
  auto* chk = app.add_subcommand("check", "Verify recorded runs against the proof invariants");
  std::string chk_run, chk_aggregate;
  double chk_eta_min = 2.0;
  bool chk_strict = false;
  chk->add_option("--run", chk_run, "Per-run trace CSV written by `run --trace`");
  chk->add_option("--aggregate", chk_aggregate, "Aggregate CSV for the convergence-rate check");
  chk->add_option("--eta-min", chk_eta_min, "Lower end of the threshold range");
  chk->add_flag("--strict", chk_strict, "Exit 3 when a check fails");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*tab) {
      vista::ExperimentConfig cfg = vista::load_config(tab_config);
      if (tab_seed) cfg.curve.seed = *tab_seed;
      if (tab_threads) cfg.run.threads = *tab_threads;
      cfg.curve.path.reset();
      const auto curve = vista::resolve_curve(cfg);
      vista::save_curve(*curve, tab_out);
      for (const auto& issue : vista::validate_curve(*curve)) std::cerr << "warning: " << issue << '\n';
      std::cout << "wrote " << curve->size() << " points to " << tab_out << '\n';
      return kExitOk;
    }

    if (*run) {
      auto cfg = load_with_overrides(run_config, run_seed_opt, run_runs, run_threads);
      if (run_trace) cfg.run.trace = true;
      const vista::BatchResult batch = vista::run_batch(cfg);
      const auto files = vista::write_batch(batch, run_out.empty() ? cfg.run.output : std::filesystem::path(run_out));
      for (const auto& p : files.paths) std::cout << "wrote " << p.string() << '\n';
      const auto [verdict, ok] = pathwise_verdict(batch.runs, batch.curve->eta_min());
      if (!ok) {
        std::cerr << verdict.dump(2) << '\n';
        if (run_strict) return kExitInvariant;
      }
      return kExitOk;
    }

    if (*cmp) {
      std::vector<vista::ExperimentConfig> configs;
      for (const auto& path : cmp_configs) {
        configs.push_back(load_with_overrides(path, std::nullopt, std::nullopt, cmp_threads));
      }
      vista::check_comparable(configs);
      std::vector<vista::BatchResult> batches;
      for (const auto& cfg : configs) batches.push_back(vista::run_batch(cfg));
      const auto table = vista::compare(batches);
      const auto files = vista::write_comparison(batches, table, cmp_out);
      for (const auto& p : files.paths) std::cout << "wrote " << p.string() << '\n';
      for (std::size_t rank = 0; rank < table.ranking.size(); ++rank) {
        const std::size_t i = table.ranking[rank];
        std::cout << rank + 1 << ". " << table.labels[i]
                  << "  final mean grad_norm_sq = " << table.columns[i]->rows.back().mean_gradsq
                  << '\n';
      }
      bool all_ok = true;
      for (const auto& b : batches) all_ok = all_ok && pathwise_verdict(b.runs, b.curve->eta_min()).second;
      if (!all_ok && cmp_strict) return kExitInvariant;
      return kExitOk;
    }

    if (*chk) {
      if (chk_run.empty() && chk_aggregate.empty()) {
        std::cerr << "check: give --run and/or --aggregate\n";
        return kExitConfig;
      }
      ordered_json out;
      bool ok = true;
      if (!chk_run.empty()) {
        std::ifstream in(chk_run);
        if (!in) throw vista::ConfigError("cannot open " + chk_run);
        const auto runs = vista::read_trace_csv(in);
        auto [verdict, pass] = pathwise_verdict(runs, chk_eta_min);
        out["pathwise"] = verdict;
        ok = ok && pass;
      }
      if (!chk_aggregate.empty()) {
        std::ifstream in(chk_aggregate);
        if (!in) throw vista::ConfigError("cannot open " + chk_aggregate);
        const auto rows = vista::read_aggregate_csv(in);
        const auto rep = vista::rate_fit(rows);
        out["rate_fit"] = {{"pass", rep.passes},
                           {"checkpoints", rep.checkpoints},
                           {"running_min", rep.running_min},
                           {"statistic", rep.statistic},
                           {"fitted_constant", rep.fitted_constant},
                           {"tolerance", rep.tolerance}};
        ok = ok && rep.passes;
      }
      out["pass"] = ok;
      std::cout << out.dump(2) << '\n';
      return (!ok && chk_strict) ? kExitInvariant : kExitOk;
    }
  } catch (const vista::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const vista::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const vista::PolicyError& e) {
    std::cerr << "policy error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitOk;
}
