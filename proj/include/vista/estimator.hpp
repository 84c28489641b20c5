#pragma once

#include <string>

#include "vista/vector_ops.hpp"
#include "vista/workers.hpp"

namespace vista {

enum class EstimatorKind { mean };

struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::mean;
};

EstimatorSpec parse_estimator(const std::string& name);
std::string to_string(EstimatorKind kind);

/// Aggregates accepted reports into a gradient estimate.
ParamVector estimate(const EstimatorSpec& spec, const RoundReports& reports);

}  // namespace vista
