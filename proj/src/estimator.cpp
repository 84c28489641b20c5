#include "vista/estimator.hpp"

#include "vista/errors.hpp"

namespace vista {

EstimatorSpec parse_estimator(const std::string& name) {
  if (name == "mean") return {EstimatorKind::mean};
  throw ConfigError("unknown estimator '" + name + "'");
}

std::string to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::mean:
      return "mean";
  }
  return "?";
}

ParamVector estimate(const EstimatorSpec& spec, const RoundReports& reports) {
  if (reports.reports.empty()) throw ContractViolation("estimate() needs at least one report");
  switch (spec.kind) {
    case EstimatorKind::mean: {
      ParamVector sum(reports.reports.front().size(), 0.0);
      for (const ParamVector& y : reports.reports) axpy(1.0, y, sum);
      const double n = static_cast<double>(reports.reports.size());
      for (double& x : sum) x /= n;
      return sum;
    }
  }
  throw ContractViolation("unsupported estimator kind");
}

}  // namespace vista
