#include "vista/rng.hpp"

#include <cmath>

namespace vista {

double Rng::normal() {
  double u, v, s;
  do {
    u = uniform(-1.0, 1.0);
    v = uniform(-1.0, 1.0);
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  return u * std::sqrt(-2.0 * std::log(s) / s);
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = Rng::mix(master ^ 0x6a09e667f3bcc909ULL);
  for (std::uint64_t k : keys) {
    h = Rng::mix(h + 0x9e3779b97f4a7c15ULL + Rng::mix(k + 0x3c6ef372fe94f82bULL));
  }
  return h;
}

}  // namespace vista
