#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "vista/config.hpp"
#include "vista/errors.hpp"

using namespace vista;

namespace {

ExperimentConfig parse(const std::string& text, const std::filesystem::path& base = {}) {
  std::istringstream in(text);
  return parse_config(in, base);
}

const char* kFull = R"(# one-dimensional suite
[objective]
name = synthetic1d
w_init = 40

[network]
n = 10
n_honest = 1
delta = 1.0
estimator = mean

[utility]
kind = log-log
lambda = 0.1

[policy]
kind = "vista"
b0 = 0.1
c = 1
beta = 0.9

[curve]
path = curves/oned.csv
eta_min = 2
eta_max = 60
points = 59
samples = 100000
coarse_points = 128
golden_iterations = 40
seed = 7

[run]
T = 2000
runs = 100
seed = 42
threads = 4
output = out
ma_window = 100
record_stride = 1
trace = true
)";

}  // namespace

TEST_CASE("full config") {
  const auto cfg = parse(kFull, "/base");
  CHECK(cfg.objective == "synthetic1d");
  CHECK(cfg.w_init == ParamVector{40.0});
  CHECK(cfg.dim() == 1);
  CHECK(cfg.network.n == 10);
  CHECK(cfg.network.n_honest == 1);
  CHECK(cfg.utility.lambda == 0.1);
  CHECK(cfg.policy.kind == PolicyKind::vista);
  CHECK(cfg.policy.vista.b0 == 0.1);
  CHECK_FALSE(cfg.policy.vista.eta0.has_value());
  CHECK(cfg.curve.path == std::filesystem::path("/base/curves/oned.csv"));
  CHECK(cfg.curve.points == 59);
  CHECK(cfg.curve.seed == 7);
  CHECK(cfg.run.horizon == 2000);
  CHECK(cfg.run.runs == 100);
  CHECK(cfg.run.master_seed == 42);
  CHECK(cfg.run.threads == 4);
  CHECK(cfg.run.output == std::filesystem::path("/base/out"));
  CHECK(cfg.run.ma_window == 100);
  CHECK(cfg.run.trace);
}

TEST_CASE("defaults and vectors") {
  const auto cfg = parse("[objective]\nname = synthetic3d\nw_init = (10, 20, 30)\n");
  CHECK(cfg.w_init == ParamVector{10, 20, 30});
  CHECK(cfg.policy.kind == PolicyKind::vista);
  CHECK(cfg.run.horizon == 2000);
  CHECK_FALSE(cfg.curve.path.has_value());
  CHECK(parse("[objective]\nname = quadratic_2\n").w_init == ParamVector{0, 0});
  CHECK(parse("[objective]\nname = quadratic_2\nw_init = [1.5, -2]\n").w_init ==
        ParamVector{1.5, -2});
}

TEST_CASE("constant policy") {
  const auto cfg = parse("[policy]\nkind = constant\neta_fixed = 5\nb0 = 0.2\n");
  CHECK(cfg.policy.kind == PolicyKind::constant);
  CHECK(cfg.policy.constant.eta_fixed == 5.0);
  CHECK(cfg.policy.b0() == 0.2);
  CHECK(cfg.policy.display_label() == "constant-eta5");
  CHECK_THROWS_AS(parse("[policy]\nkind = constant\n"), ConfigError);
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(parse("[objective]\nnmae = synthetic1d\n"), ConfigError);
  CHECK_THROWS_AS(parse("[objectiv]\nname = synthetic1d\n"), ConfigError);
  CHECK_THROWS_AS(parse("[objective]\nname = bogus\n"), ConfigError);
  CHECK_THROWS_AS(parse("[objective]\nname = synthetic3d\nw_init = 1, 2\n"), ConfigError);
  CHECK_THROWS_AS(parse("[objective]\nw_init = 1, x\n"), ConfigError);
  CHECK_THROWS_AS(parse("[network]\nn = ten\n"), ConfigError);
  CHECK_THROWS_AS(parse("[network]\nn = 3\nn_honest = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse("[network]\nestimator = median\n"), ConfigError);
  CHECK_THROWS_AS(parse("[utility]\nkind = linear\n"), ConfigError);
  CHECK_THROWS_AS(parse("[utility]\nlambda = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse("[policy]\nkind = adam\n"), ConfigError);
  CHECK_THROWS_AS(parse("[curve]\neta_min = 1.5\n"), ConfigError);
  CHECK_THROWS_AS(parse("[curve]\nsamples = 100\n"), ConfigError);
  CHECK_THROWS_AS(parse("[run]\nT = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse("[run]\ntrace = maybe\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.ini"), ConfigError);
  try {
    parse("[objective]\nname = synthetic1d\n[network\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
}
