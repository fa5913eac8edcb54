#ifndef LAXFLOW_RANDOM_STATE_HPP
#define LAXFLOW_RANDOM_STATE_HPP

#include <cstdint>
#include <random>

#include "laxflow/errors.hpp"
#include "laxflow/model.hpp"

namespace laxflow {

/// Seeded placement of non-singular initial states.
///
/// Positions are a chain q_{j+1} = q_j + gap + spread * u_j; momenta are
/// uniform in [-momentum_scale, momentum_scale]. For epsilon = 0 both are
/// shifted to zero mean (when center is set). For epsilon = 1 the chain starts
/// at gap + spread * u_0 so every reflected denominator q_j + q_k and q_j is
/// at least gap as well.
struct StateGenerator {
  double gap = 0.1;
  double spread = 1.0;
  double momentum_scale = 0.5;
  bool center = true;

  void validate() const {
    if (!(gap > 0.0)) throw ConfigError("generator: gap must be > 0");
    if (!(spread >= 0.0)) throw ConfigError("generator: spread must be >= 0");
    if (!(momentum_scale >= 0.0)) throw ConfigError("generator: momentum_scale must be >= 0");
  }
};

/// Uniform double in [0, 1) from the top 53 bits. Unlike
/// std::uniform_real_distribution it is identical across standard libraries.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline PhaseState generate_state(const ModelParams& params, const StateGenerator& gen,
                                 std::uint64_t seed) {
  params.validate();
  gen.validate();
  std::mt19937_64 rng(seed);
  const auto n = static_cast<std::size_t>(params.n);
  PhaseState s;
  s.q.resize(n);
  s.p.resize(n);
  const bool reflected = params.epsilon == 1;
  double x = reflected ? gen.gap + gen.spread * unit_uniform(rng) : 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (j > 0) x += gen.gap + gen.spread * unit_uniform(rng);
    s.q[j] = x;
  }
  for (auto& v : s.p) v = gen.momentum_scale * (2.0 * unit_uniform(rng) - 1.0);
  if (gen.center) {
    PhaseState centered = center_of_mass_projection(s);
    if (!reflected) s.q = centered.q;
    s.p = centered.p;
  }
  return s;
}

}  // namespace laxflow

#endif  // LAXFLOW_RANDOM_STATE_HPP
