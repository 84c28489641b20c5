#include "vista/controller.hpp"

#include <cmath>
#include <cstdio>
#include <utility>

#include "vista/errors.hpp"

namespace vista {

std::vector<std::string> validate_vista_config(const VistaConfig& cfg,
                                               const EquilibriumCurve& curve,
                                               std::optional<double> smoothness) {
  if (!(cfg.b0 > 0.0)) throw ConfigError("b0 must be positive");
  if (!(cfg.c > 0.0)) throw ConfigError("c must be positive");
  if (!(cfg.beta >= 0.0 && cfg.beta < 1.0)) throw ConfigError("beta must lie in [0, 1)");
  if (cfg.eta0 && !(*cfg.eta0 >= curve.eta_min() && *cfg.eta0 <= curve.eta_max())) {
    throw ConfigError("eta0 must lie in [eta_min, eta_max]");
  }
  std::vector<std::string> warnings;
  if (cfg.mode == ProxyMode::oracle && smoothness) {
    const double limit = 1.0 / (*smoothness * (1.0 + cfg.c));
    if (cfg.b0 > limit) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "oracle mode: b0 = %g exceeds 1/(l(1+c)) = %g", cfg.b0,
                    limit);
      warnings.emplace_back(buf);
    }
  }
  return warnings;
}

VistaState init(const VistaConfig& cfg, const EquilibriumCurve& curve, ParamVector w_init) {
  VistaState s;
  s.m.assign(w_init.size(), 0.0);
  s.g_tilde.assign(w_init.size(), 0.0);
  s.w = std::move(w_init);
  s.eta = cfg.eta0.value_or(0.5 * (curve.eta_min() + curve.eta_max()));
  s.last_b = 0.0;
  return s;
}

double current_learning_rate(const VistaState& state, const VistaConfig& cfg) {
  return cfg.b0 / std::sqrt(static_cast<double>(state.tau) + 1.0);
}

AcceptOutcome on_accepted(VistaState& state, const VistaConfig& cfg, const EquilibriumCurve& curve,
                          const ParamVector& g_hat, const GradNormOracle& oracle) {
  if (g_hat.size() != state.w.size()) throw ContractViolation("gradient estimate dimension");
  if (cfg.mode == ProxyMode::oracle && !oracle) {
    throw ContractViolation("oracle mode needs the gradient-norm oracle");
  }
  AcceptOutcome out;
  out.eta_applied = state.eta;
  out.b_applied = current_learning_rate(state, cfg);

  axpy(-out.b_applied, g_hat, state.w);
  ++state.u;
  for (std::size_t i = 0; i < g_hat.size(); ++i) {
    state.m[i] = cfg.beta * state.m[i] + (1.0 - cfg.beta) * g_hat[i];
  }
  const double correction = 1.0 - std::pow(cfg.beta, static_cast<double>(state.u));
  for (std::size_t i = 0; i < g_hat.size(); ++i) state.g_tilde[i] = state.m[i] / correction;

  out.saturated = state.eta == curve.eta_min();
  if (out.saturated) ++state.tau;
  state.last_b = out.b_applied;

  const double proxy = cfg.mode == ProxyMode::oracle ? oracle(state.w) : norm_sq(state.g_tilde);
  state.eta = eta_for_target_mse(curve, cfg.c * proxy);
  out.next_eta = state.eta;
  return out;
}

void on_rejected(VistaState&) {}

ConstantPolicyConfig constant_policy(double eta_fixed, double b0) {
  if (!(b0 > 0.0)) throw ConfigError("b0 must be positive");
  if (!(eta_fixed >= 2.0)) throw PolicyError("eta_fixed must be at least 2");
  return {eta_fixed, b0};
}

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::vista:
      return "vista";
    case PolicyKind::vista_oracle:
      return "vista-oracle";
    case PolicyKind::constant:
      return "constant";
  }
  return "?";
}

PolicyKind parse_policy_kind(const std::string& name) {
  if (name == "vista") return PolicyKind::vista;
  if (name == "vista-oracle") return PolicyKind::vista_oracle;
  if (name == "constant") return PolicyKind::constant;
  throw ConfigError("unknown policy '" + name + "'");
}

std::string PolicySpec::display_label() const {
  if (!label.empty()) return label;
  if (kind != PolicyKind::constant) return to_string(kind);
  char buf[64];
  std::snprintf(buf, sizeof buf, "constant-eta%g", constant.eta_fixed);
  return buf;
}

Controller::Controller(const PolicySpec& spec, std::shared_ptr<const EquilibriumCurve> curve,
                       ParamVector w_init)
    : spec_(spec), curve_(std::move(curve)) {
  if (!curve_) throw ContractViolation("controller needs an equilibrium curve");
  if (spec_.kind == PolicyKind::constant) {
    const auto& c = spec_.constant;
    if (!(c.eta_fixed >= curve_->eta_min() && c.eta_fixed <= curve_->eta_max())) {
      throw ConfigError("eta_fixed must lie in [eta_min, eta_max]");
    }
    if (!(c.b0 > 0.0)) throw ConfigError("b0 must be positive");
    state_.m.assign(w_init.size(), 0.0);
    state_.g_tilde.assign(w_init.size(), 0.0);
    state_.w = std::move(w_init);
    state_.eta = c.eta_fixed;
  } else {
    spec_.vista.mode = spec_.kind == PolicyKind::vista_oracle ? ProxyMode::oracle
                                                              : ProxyMode::ema_proxy;
    validate_vista_config(spec_.vista, *curve_);
    state_ = init(spec_.vista, *curve_, std::move(w_init));
  }
}

double Controller::learning_rate() const {
  if (spec_.kind == PolicyKind::constant) {
    return spec_.constant.b0 / std::sqrt(static_cast<double>(state_.u) + 1.0);
  }
  return current_learning_rate(state_, spec_.vista);
}

AcceptOutcome Controller::accept(const ParamVector& g_hat, const GradNormOracle& oracle) {
  if (spec_.kind != PolicyKind::constant) {
    return on_accepted(state_, spec_.vista, *curve_, g_hat, oracle);
  }
  if (g_hat.size() != state_.w.size()) throw ContractViolation("gradient estimate dimension");
  AcceptOutcome out;
  out.eta_applied = state_.eta;
  out.b_applied = learning_rate();
  axpy(-out.b_applied, g_hat, state_.w);
  ++state_.u;
  out.saturated = state_.eta == curve_->eta_min();
  if (out.saturated) ++state_.tau;
  state_.last_b = out.b_applied;
  out.next_eta = state_.eta;
  return out;
}

void Controller::reject() { on_rejected(state_); }

}  // namespace vista
