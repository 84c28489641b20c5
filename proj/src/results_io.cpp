#include "vista/results_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "vista/errors.hpp"

namespace vista {

namespace {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t end = line.find(',', pos);
    out.push_back(line.substr(pos, end == std::string::npos ? std::string::npos : end - pos));
    if (end == std::string::npos) break;
    pos = end + 1;
  }
  return out;
}

template <typename T>
T parse_field(const std::string& s, std::size_t line, std::size_t col) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("cannot parse '" + s + "'", line, col);
  }
  return v;
}

void expect_header(std::istream& in, const char* header) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing header", 1, 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) throw ParseError(std::string("expected header '") + header + "'", 1, 1);
}

nlohmann::ordered_json config_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["objective"] = {{"name", c.objective}, {"w_init", c.w_init}};
  j["network"] = {{"n", c.network.n},
                  {"n_honest", c.network.n_honest},
                  {"delta", c.network.delta},
                  {"estimator", to_string(c.estimator.kind)}};
  j["utility"] = {{"kind", "log-log"}, {"lambda", c.utility.lambda}};
  nlohmann::ordered_json policy = {{"kind", to_string(c.policy.kind)},
                                   {"label", c.policy.display_label()},
                                   {"b0", c.policy.b0()}};
  if (c.policy.kind == PolicyKind::constant) {
    policy["eta_fixed"] = c.policy.constant.eta_fixed;
  } else {
    policy["c"] = c.policy.vista.c;
    policy["beta"] = c.policy.vista.beta;
    if (c.policy.vista.eta0) policy["eta0"] = *c.policy.vista.eta0;
  }
  j["policy"] = policy;
  nlohmann::ordered_json curve = {{"eta_min", c.curve.eta_min},
                                  {"eta_max", c.curve.eta_max},
                                  {"points", c.curve.points},
                                  {"samples", c.curve.solver.samples},
                                  {"coarse_points", c.curve.solver.coarse_points},
                                  {"golden_iterations", c.curve.solver.golden_iterations},
                                  {"seed", c.curve.seed}};
  if (c.curve.path) curve["path"] = c.curve.path->filename().string();
  j["curve"] = curve;
  j["run"] = {{"T", c.run.horizon},
              {"runs", c.run.runs},
              {"seed", c.run.master_seed},
              {"ma_window", c.run.ma_window},
              {"record_stride", c.run.record_stride}};
  return j;
}

nlohmann::ordered_json row_json(const AggregateRow& r) {
  return {{"t", r.t},
          {"mean_loss", r.mean_loss},
          {"std_loss", r.std_loss},
          {"mean_gradsq", r.mean_gradsq},
          {"std_gradsq", r.std_gradsq},
          {"mean_eta", r.mean_eta},
          {"accept_rate", r.accept_rate},
          {"saturate_rate", r.saturate_rate},
          {"mean_b", r.mean_b}};
}

void write_file(const std::filesystem::path& path, const std::string& content,
                WrittenFiles& files) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << content;
  if (!out) throw ConfigError("failed writing " + path.string());
  files.paths.push_back(path);
}

}  // namespace

void write_aggregate_csv(std::span<const AggregateRow> rows, std::ostream& out) {
  out << kAggregateHeader << '\n';
  for (const auto& r : rows) {
    out << r.t << ',' << num(r.mean_loss) << ',' << num(r.std_loss) << ',' << num(r.mean_gradsq)
        << ',' << num(r.std_gradsq) << ',' << num(r.mean_eta) << ',' << num(r.accept_rate) << ','
        << num(r.saturate_rate) << ',' << num(r.mean_b) << '\n';
  }
}

std::vector<AggregateRow> read_aggregate_csv(std::istream& in) {
  expect_header(in, kAggregateHeader);
  std::vector<AggregateRow> rows;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 9) throw ParseError("expected 9 fields", line_no, 1);
    AggregateRow r;
    r.t = parse_field<std::size_t>(f[0], line_no, 1);
    r.mean_loss = parse_field<double>(f[1], line_no, 2);
    r.std_loss = parse_field<double>(f[2], line_no, 3);
    r.mean_gradsq = parse_field<double>(f[3], line_no, 4);
    r.std_gradsq = parse_field<double>(f[4], line_no, 5);
    r.mean_eta = parse_field<double>(f[5], line_no, 6);
    r.accept_rate = parse_field<double>(f[6], line_no, 7);
    r.saturate_rate = parse_field<double>(f[7], line_no, 8);
    r.mean_b = parse_field<double>(f[8], line_no, 9);
    rows.push_back(r);
  }
  return rows;
}

void write_trace_csv(std::span<const RunRecord> runs, std::ostream& out) {
  out << kTraceHeader << '\n';
  for (const auto& run : runs) {
    for (const auto& r : run.rounds) {
      out << run.run_index << ',' << run.seed << ',' << r.t << ',' << num(r.eta_applied) << ','
          << num(r.b_applied) << ',' << (r.accepted ? 1 : 0) << ',' << (r.saturated ? 1 : 0)
          << ',' << r.u << ',' << r.tau << ',' << num(r.loss) << ',' << num(r.grad_norm_sq) << ','
          << (r.est_err_sq ? num(*r.est_err_sq) : std::string()) << ','
          << num(r.r_star_applied) << '\n';
    }
  }
}

std::vector<RunRecord> read_trace_csv(std::istream& in) {
  expect_header(in, kTraceHeader);
  std::vector<RunRecord> runs;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 13) throw ParseError("expected 13 fields", line_no, 1);
    const auto run_index = parse_field<std::size_t>(f[0], line_no, 1);
    if (runs.empty() || runs.back().run_index != run_index) {
      RunRecord run;
      run.run_index = run_index;
      run.seed = parse_field<std::uint64_t>(f[1], line_no, 2);
      runs.push_back(std::move(run));
    }
    RoundRecord r;
    r.t = parse_field<std::size_t>(f[2], line_no, 3);
    r.eta_applied = parse_field<double>(f[3], line_no, 4);
    r.b_applied = parse_field<double>(f[4], line_no, 5);
    r.accepted = parse_field<int>(f[5], line_no, 6) != 0;
    r.saturated = parse_field<int>(f[6], line_no, 7) != 0;
    r.u = parse_field<std::size_t>(f[7], line_no, 8);
    r.tau = parse_field<std::size_t>(f[8], line_no, 9);
    r.loss = parse_field<double>(f[9], line_no, 10);
    r.grad_norm_sq = parse_field<double>(f[10], line_no, 11);
    if (!f[11].empty()) r.est_err_sq = parse_field<double>(f[11], line_no, 12);
    r.r_star_applied = parse_field<double>(f[12], line_no, 13);
    RunRecord& run = runs.back();
    if (run.rounds.empty()) run.b0 = r.b_applied;
    run.rounds.push_back(r);
  }
  return runs;
}

std::string summary_json(const BatchResult& batch) {
  nlohmann::ordered_json j;
  j["label"] = batch.label();
  j["master_seed"] = batch.config.run.master_seed;
  j["config"] = config_json(batch.config);
  const auto& agg = batch.aggregate;
  j["final"] = agg.rows.empty() ? nlohmann::ordered_json() : row_json(agg.rows.back());
  double acc = 0.0;
  std::size_t left = 0;
  for (const auto& r : batch.runs) {
    acc += r.summary.acceptance_rate;
    if (r.left_region) ++left;
  }
  j["mean_acceptance_rate"] = acc / static_cast<double>(batch.runs.size());
  j["runs_left_region"] = left;
  nlohmann::ordered_json runs = nlohmann::ordered_json::array();
  for (const auto& r : batch.runs) {
    nlohmann::ordered_json s = {{"run", r.run_index},
                                {"seed", r.seed},
                                {"final_loss", r.summary.final_loss},
                                {"min_grad_norm_sq", r.summary.min_grad_norm_sq},
                                {"acceptance_rate", r.summary.acceptance_rate}};
    s["saturation_entry_round"] = r.summary.saturation_entry_round
                                      ? nlohmann::ordered_json(*r.summary.saturation_entry_round)
                                      : nlohmann::ordered_json();
    if (!r.warnings.empty()) s["warnings"] = r.warnings;
    runs.push_back(std::move(s));
  }
  j["runs"] = std::move(runs);
  return j.dump(2) + "\n";
}

WrittenFiles write_batch(const BatchResult& batch, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  WrittenFiles files;
  const std::string label = batch.label();
  std::ostringstream agg;
  write_aggregate_csv(batch.aggregate.rows, agg);
  write_file(dir / (label + ".csv"), agg.str(), files);
  if (!batch.aggregate.moving_average_rows.empty()) {
    std::ostringstream ma;
    write_aggregate_csv(batch.aggregate.moving_average_rows, ma);
    write_file(dir / (label + "_ma.csv"), ma.str(), files);
  }
  write_file(dir / (label + "_summary.json"), summary_json(batch), files);
  if (batch.config.run.trace) {
    std::ostringstream trace;
    write_trace_csv(batch.runs, trace);
    write_file(dir / (label + "_trace.csv"), trace.str(), files);
  }
  return files;
}

WrittenFiles write_comparison(std::span<const BatchResult> batches, const ComparisonTable& table,
                              const std::filesystem::path& dir) {
  WrittenFiles files;
  for (const auto& b : batches) {
    auto written = write_batch(b, dir);
    files.paths.insert(files.paths.end(), written.paths.begin(), written.paths.end());
  }
  std::ostringstream csv;
  csv << 't';
  for (const auto& label : table.labels) csv << ',' << label << "_mean_loss," << label << "_mean_gradsq";
  csv << '\n';
  std::size_t rows = table.columns.front()->rows.size();
  for (const Aggregate* col : table.columns) rows = std::min(rows, col->rows.size());
  for (std::size_t i = 0; i < rows; ++i) {
    csv << table.columns.front()->rows[i].t;
    for (const Aggregate* col : table.columns) {
      csv << ',' << num(col->rows[i].mean_loss) << ',' << num(col->rows[i].mean_gradsq);
    }
    csv << '\n';
  }
  write_file(dir / "comparison.csv", csv.str(), files);

  nlohmann::ordered_json j;
  nlohmann::ordered_json ranking = nlohmann::ordered_json::array();
  for (std::size_t rank = 0; rank < table.ranking.size(); ++rank) {
    const std::size_t idx = table.ranking[rank];
    const AggregateRow& last = table.columns[idx]->rows.back();
    ranking.push_back({{"rank", rank + 1},
                       {"label", table.labels[idx]},
                       {"final_mean_gradsq", last.mean_gradsq},
                       {"final_std_gradsq", last.std_gradsq},
                       {"final_mean_loss", last.mean_loss},
                       {"runs", table.columns[idx]->runs}});
  }
  j["ranking"] = std::move(ranking);
  write_file(dir / "comparison.json", j.dump(2) + "\n", files);
  return files;
}

}  // namespace vista
