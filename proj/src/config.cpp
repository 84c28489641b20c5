#include "vista/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <map>
#include <set>

#include "vista/errors.hpp"
#include "vista/objectives.hpp"

namespace vista {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"objective", {"name", "w_init"}},
      {"network", {"n", "n_honest", "delta", "estimator"}},
      {"utility", {"kind", "lambda"}},
      {"policy", {"kind", "b0", "c", "beta", "eta0", "eta_fixed", "label"}},
      {"curve",
       {"path", "eta_min", "eta_max", "points", "samples", "coarse_points", "golden_iterations",
        "seed"}},
      {"run",
       {"T", "runs", "seed", "threads", "output", "ma_window", "record_stride", "trace"}},
  };
  return keys;
}

std::string unquote(std::string s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                        (s.front() == '\'' && s.back() == '\''))) {
    s = s.substr(1, s.size() - 2);
  }
  return s;
}

class Section {
 public:
  Section(const pt::ptree* tree, std::string name) : tree_(tree), name_(std::move(name)) {}

  std::optional<std::string> raw(const std::string& key) const {
    if (!tree_) return std::nullopt;
    auto v = tree_->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
    if (!v) return std::nullopt;
    return unquote(*v);
  }

  template <typename T>
  std::optional<T> number(const std::string& key) const {
    auto s = raw(key);
    if (!s) return std::nullopt;
    T value{};
    const char* first = s->data();
    const char* last = s->data() + s->size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
      throw ConfigError("[" + name_ + "] " + key + ": cannot parse '" + *s + "'");
    }
    return value;
  }

  std::optional<bool> boolean(const std::string& key) const {
    auto s = raw(key);
    if (!s) return std::nullopt;
    if (*s == "true" || *s == "1" || *s == "yes") return true;
    if (*s == "false" || *s == "0" || *s == "no") return false;
    throw ConfigError("[" + name_ + "] " + key + ": expected a boolean, got '" + *s + "'");
  }

 private:
  const pt::ptree* tree_;
  std::string name_;
};

ParamVector parse_vector(const std::string& text, const std::string& what) {
  ParamVector out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string::npos) end = text.size();
    std::string item = text.substr(pos, end - pos);
    const auto b = item.find_first_not_of(" \t()[]");
    const auto e = item.find_last_not_of(" \t()[]");
    if (b == std::string::npos) throw ConfigError(what + ": empty component");
    item = item.substr(b, e - b + 1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size()) {
      throw ConfigError(what + ": cannot parse '" + item + "'");
    }
    out.push_back(v);
    pos = end + 1;
  }
  return out;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base.empty()) return base / path;
  return path;
}

}  // namespace

void ExperimentConfig::validate() const {
  const Objective obj = lookup_objective(objective);
  if (w_init.size() != obj.dim()) {
    throw ConfigError("w_init has dimension " + std::to_string(w_init.size()) + " but objective '" +
                      objective + "' has dimension " + std::to_string(obj.dim()));
  }
  network.validate();
  utility.validate();
  if (run.horizon < 1) throw ConfigError("T must be at least 1");
  if (run.runs < 1) throw ConfigError("runs must be at least 1");
  if (run.record_stride < 1) throw ConfigError("record_stride must be at least 1");
  if (!(curve.eta_min >= 2.0)) throw ConfigError("eta_min must be at least 2");
  if (curve.points < 1) throw ConfigError("curve needs at least one point");
  if (curve.points > 1 && !(curve.eta_max > curve.eta_min)) {
    throw ConfigError("eta_max must exceed eta_min");
  }
  if (curve.solver.samples < kMinStrategySamples) {
    throw ConfigError("curve samples must be at least 10000");
  }
  if (policy.b0() <= 0.0) throw ConfigError("b0 must be positive");
}

ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(e.message(), e.line(), 1);
  }

  for (const auto& [section, body] : tree) {
    auto it = allowed_keys().find(section);
    if (it == allowed_keys().end()) throw ConfigError("unknown section [" + section + "]");
    if (!body.data().empty() && body.empty()) {
      throw ConfigError("key '" + section + "' outside of any section");
    }
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
    }
  }

  auto section = [&](const std::string& name) {
    auto child = tree.get_child_optional(name);
    return Section(child ? &*child : nullptr, name);
  };

  ExperimentConfig cfg;

  const Section objective = section("objective");
  cfg.objective = objective.raw("name").value_or(cfg.objective);
  const Objective obj = lookup_objective(cfg.objective);
  if (auto w = objective.raw("w_init")) {
    cfg.w_init = parse_vector(*w, "[objective] w_init");
  } else {
    cfg.w_init.assign(obj.dim(), 0.0);
  }

  const Section network = section("network");
  cfg.network.n = network.number<std::size_t>("n").value_or(cfg.network.n);
  cfg.network.n_honest = network.number<std::size_t>("n_honest").value_or(cfg.network.n_honest);
  cfg.network.delta = network.number<double>("delta").value_or(cfg.network.delta);
  if (auto e = network.raw("estimator")) cfg.estimator = parse_estimator(*e);

  const Section utility = section("utility");
  if (auto kind = utility.raw("kind"); kind && *kind != "log-log") {
    throw ConfigError("unknown utility kind '" + *kind + "'");
  }
  cfg.utility.lambda = utility.number<double>("lambda").value_or(cfg.utility.lambda);

  const Section policy = section("policy");
  cfg.policy.kind = parse_policy_kind(policy.raw("kind").value_or("vista"));
  const double b0 = policy.number<double>("b0").value_or(0.1);
  cfg.policy.vista.b0 = b0;
  cfg.policy.constant.b0 = b0;
  cfg.policy.vista.c = policy.number<double>("c").value_or(cfg.policy.vista.c);
  cfg.policy.vista.beta = policy.number<double>("beta").value_or(cfg.policy.vista.beta);
  cfg.policy.vista.eta0 = policy.number<double>("eta0");
  cfg.policy.label = policy.raw("label").value_or("");
  if (auto eta = policy.number<double>("eta_fixed")) {
    cfg.policy.constant.eta_fixed = *eta;
  } else if (cfg.policy.kind == PolicyKind::constant) {
    throw ConfigError("constant policy needs [policy] eta_fixed");
  }

  const Section curve = section("curve");
  if (auto p = curve.raw("path")) cfg.curve.path = resolve(base_dir, *p);
  cfg.curve.eta_min = curve.number<double>("eta_min").value_or(cfg.curve.eta_min);
  cfg.curve.eta_max = curve.number<double>("eta_max").value_or(cfg.curve.eta_max);
  cfg.curve.points = curve.number<std::size_t>("points").value_or(cfg.curve.points);
  cfg.curve.solver.samples =
      curve.number<std::size_t>("samples").value_or(cfg.curve.solver.samples);
  cfg.curve.solver.coarse_points =
      curve.number<std::size_t>("coarse_points").value_or(cfg.curve.solver.coarse_points);
  cfg.curve.solver.golden_iterations =
      curve.number<std::size_t>("golden_iterations").value_or(cfg.curve.solver.golden_iterations);
  cfg.curve.seed = curve.number<std::uint64_t>("seed").value_or(cfg.curve.seed);

  const Section run = section("run");
  cfg.run.horizon = run.number<std::size_t>("T").value_or(cfg.run.horizon);
  cfg.run.runs = run.number<std::size_t>("runs").value_or(cfg.run.runs);
  cfg.run.master_seed = run.number<std::uint64_t>("seed").value_or(cfg.run.master_seed);
  cfg.run.threads = run.number<unsigned>("threads").value_or(cfg.run.threads);
  if (auto out = run.raw("output")) cfg.run.output = resolve(base_dir, *out);
  cfg.run.ma_window = run.number<std::size_t>("ma_window").value_or(cfg.run.ma_window);
  cfg.run.record_stride = run.number<std::size_t>("record_stride").value_or(cfg.run.record_stride);
  cfg.run.trace = run.boolean("trace").value_or(cfg.run.trace);

  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_config(in, path.parent_path());
}

}  // namespace vista
