#ifndef LAXFLOW_TESTS_SUPPORT_HPP
#define LAXFLOW_TESTS_SUPPORT_HPP

#include <cstdint>

#include "laxflow/laxflow.hpp"

namespace support {

inline laxflow::ModelParams calogero(int n, double g2, double omega) {
  laxflow::ModelParams m;
  m.n = n;
  m.g2 = g2;
  m.omega = omega;
  return m;
}

/// Moderate initial data inside the trap: gaps 0.5..1, momenta up to 0.5.
inline laxflow::StateGenerator trap_scale() {
  laxflow::StateGenerator g;
  g.gap = 0.5;
  g.spread = 0.5;
  g.momentum_scale = 0.5;
  return g;
}

inline laxflow::PhaseState state(const laxflow::ModelParams& m, std::uint64_t seed,
                                 laxflow::StateGenerator gen = {}) {
  return laxflow::generate_state(m, gen, seed);
}

}  // namespace support

#endif  // LAXFLOW_TESTS_SUPPORT_HPP
