#pragma once

#include <span>
#include <vector>

namespace vista {

/// Least-squares projection onto nondecreasing sequences (pool adjacent
/// violators). Empty weights means unit weights.
std::vector<double> isotonic_nondecreasing(std::span<const double> y,
                                           std::span<const double> weights = {});

}  // namespace vista
