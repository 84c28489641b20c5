#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vista/equilibrium.hpp"
#include "vista/vector_ops.hpp"

namespace vista {

/// How the next threshold's variance target is formed after an accepted round.
enum class ProxyMode {
  ema_proxy,  // c * ||bias-corrected EMA of accepted estimates||^2
  oracle,     // c * ||grad L(W_t)||^2, simulation only
};

struct VistaConfig {
  double b0 = 0.1;
  double c = 1.0;
  double beta = 0.9;
  std::optional<double> eta0;  // defaults to the middle of the curve's eta range
  ProxyMode mode = ProxyMode::ema_proxy;
};

/// Throws ConfigError on hard violations; returns warnings (for instance an
/// oracle-mode b0 above 1 / (smoothness (1 + c))).
std::vector<std::string> validate_vista_config(const VistaConfig& cfg,
                                               const EquilibriumCurve& curve,
                                               std::optional<double> smoothness = std::nullopt);

struct VistaState {
  ParamVector w;        // W_{t-1}
  ParamVector m;        // EMA accumulator
  ParamVector g_tilde;  // bias-corrected EMA
  std::size_t u = 0;    // accepted rounds
  std::size_t tau = 0;  // accepted rounds taken at eta_min
  double eta = 2.0;     // threshold announced for the coming round
  double last_b = 0.0;  // learning rate of the last applied update

  bool operator==(const VistaState&) const = default;
};

VistaState init(const VistaConfig& cfg, const EquilibriumCurve& curve, ParamVector w_init);

/// b0 / sqrt(tau + 1), with tau as it stands entering the round.
double current_learning_rate(const VistaState& state, const VistaConfig& cfg);

/// Returns ||grad L(w)||^2 at the updated iterate. Required in oracle mode.
using GradNormOracle = std::function<double(const ParamVector& w)>;

struct AcceptOutcome {
  double eta_applied = 0.0;
  double b_applied = 0.0;
  bool saturated = false;
  double next_eta = 0.0;
};

/// One accepted round: descent step with the current learning rate, EMA and
/// bias correction, saturation bookkeeping against the threshold used this
/// round, then the next threshold from the target-variance rule.
AcceptOutcome on_accepted(VistaState& state, const VistaConfig& cfg, const EquilibriumCurve& curve,
                          const ParamVector& g_hat, const GradNormOracle& oracle = {});

/// A rejected round leaves the whole state untouched.
void on_rejected(VistaState& state);

/// Fixed-threshold baseline with learning rate b0 / sqrt(u + 1).
struct ConstantPolicyConfig {
  double eta_fixed = 2.0;
  double b0 = 0.1;
};

ConstantPolicyConfig constant_policy(double eta_fixed, double b0);

enum class PolicyKind { vista, vista_oracle, constant };

std::string to_string(PolicyKind kind);
PolicyKind parse_policy_kind(const std::string& name);

struct PolicySpec {
  PolicyKind kind = PolicyKind::vista;
  VistaConfig vista;
  ConstantPolicyConfig constant;
  std::string label;  // output name; derived from kind when empty

  double b0() const { return kind == PolicyKind::constant ? constant.b0 : vista.b0; }
  std::string display_label() const;
};

/// Policy-agnostic driver for the round loop.
class Controller {
 public:
  Controller(const PolicySpec& spec, std::shared_ptr<const EquilibriumCurve> curve,
             ParamVector w_init);

  double eta() const { return state_.eta; }
  double learning_rate() const;
  const VistaState& state() const { return state_; }
  const PolicySpec& spec() const { return spec_; }
  bool needs_oracle() const { return spec_.kind == PolicyKind::vista_oracle; }

  AcceptOutcome accept(const ParamVector& g_hat, const GradNormOracle& oracle = {});
  void reject();

 private:
  PolicySpec spec_;
  std::shared_ptr<const EquilibriumCurve> curve_;
  VistaState state_;
};

}  // namespace vista
