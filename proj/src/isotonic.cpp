#include "vista/isotonic.hpp"

#include "vista/errors.hpp"

namespace vista {

std::vector<double> isotonic_nondecreasing(std::span<const double> y,
                                           std::span<const double> weights) {
  if (!weights.empty() && weights.size() != y.size()) {
    throw ContractViolation("isotonic: weights and values differ in length");
  }
  struct Block {
    double value;
    double weight;
    std::size_t count;
  };
  std::vector<Block> blocks;
  blocks.reserve(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    if (!(w > 0.0)) throw ContractViolation("isotonic: weights must be positive");
    blocks.push_back({y[i], w, 1});
    // Merge backwards while the last two blocks violate the order.
    while (blocks.size() > 1 && blocks[blocks.size() - 2].value > blocks.back().value) {
      Block top = blocks.back();
      blocks.pop_back();
      Block& prev = blocks.back();
      const double total = prev.weight + top.weight;
      prev.value = (prev.weight * prev.value + top.weight * top.value) / total;
      prev.weight = total;
      prev.count += top.count;
    }
  }
  std::vector<double> out;
  out.reserve(y.size());
  for (const Block& b : blocks) out.insert(out.end(), b.count, b.value);
  return out;
}

}  // namespace vista
