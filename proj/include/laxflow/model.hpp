#ifndef LAXFLOW_MODEL_HPP
#define LAXFLOW_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "laxflow/errors.hpp"

namespace laxflow {

inline constexpr double kDefaultSeparationFloor = 1e-12;

/// Couplings of the inverse-square potential family in a harmonic well.
///
///   U = g2 * sum_{k<l} [V(q_k - q_l) + epsilon V(q_k + q_l)]
///     + g1sq * sum_k V(q_k) + g2sq_single * sum_k V(2 q_k)
///     + omega^2 / 2 * sum_k q_k^2,          V(x) = 1 / x^2.
///
/// Couplings are stored squared, exactly as they enter U.
struct ModelParams {
  int n = 1;
  double g2 = 0.0;
  double g1sq = 0.0;
  double g2sq_single = 0.0;
  int epsilon = 0;
  double omega = 0.0;
  double separation_floor = kDefaultSeparationFloor;

  /// Lax pair and invariants exist only for the plain pair interaction.
  bool lax_supported() const noexcept {
    return epsilon == 0 && g1sq == 0.0 && g2sq_single == 0.0;
  }

  bool has_reflection_terms() const noexcept { return epsilon == 1; }
  bool has_single_terms() const noexcept { return g1sq > 0.0 || g2sq_single > 0.0; }

  /// Pair coupling g = +sqrt(g^2) used in the Lax matrices.
  double coupling() const noexcept { return std::sqrt(g2); }

  /// Throws ConfigError when an invariant is violated.
  void validate() const {
    if (n < 1) throw ConfigError("ModelParams: n must be >= 1");
    const double values[] = {g2, g1sq, g2sq_single, omega, separation_floor};
    for (double v : values) {
      if (!std::isfinite(v)) throw ConfigError("ModelParams: couplings must be finite");
    }
    if (g2 < 0.0 || g1sq < 0.0 || g2sq_single < 0.0)
      throw ConfigError("ModelParams: squared couplings must be >= 0");
    if (omega < 0.0) throw ConfigError("ModelParams: omega must be >= 0");
    if (epsilon != 0 && epsilon != 1) throw ConfigError("ModelParams: epsilon must be 0 or 1");
    if (has_single_terms() && epsilon != 1)
      throw ConfigError("ModelParams: g1sq or g2sq_single > 0 requires epsilon = 1");
    if (separation_floor <= 0.0) throw ConfigError("ModelParams: separation floor must be > 0");
  }

  bool operator==(const ModelParams&) const = default;
};

/// Positions, momenta and time of one phase point.
struct PhaseState {
  std::vector<double> q;
  std::vector<double> p;
  double t = 0.0;

  std::size_t size() const noexcept { return q.size(); }

  bool finite() const noexcept {
    auto ok = [](double v) { return std::isfinite(v); };
    return std::isfinite(t) && std::all_of(q.begin(), q.end(), ok) &&
           std::all_of(p.begin(), p.end(), ok);
  }

  bool operator==(const PhaseState&) const = default;
};

namespace detail {

inline void require_length(const ModelParams& params, std::span<const double> q) {
  if (q.size() != static_cast<std::size_t>(params.n))
    throw DimensionMismatch("coordinate vector length differs from n");
}

inline void require_state(const ModelParams& params, const PhaseState& state) {
  require_length(params, state.q);
  if (state.p.size() != state.q.size()) throw DimensionMismatch("q and p lengths differ");
}

inline double inv_square(double x) { return 1.0 / (x * x); }
inline double inv_cube(double x) { return 1.0 / (x * x * x); }

}  // namespace detail

/// Smallest |denominator| among the active potential terms: gaps q_j - q_k
/// (always, the Lax matrices use them), plus q_j + q_k when epsilon = 1, plus
/// q_j and 2 q_j when the single couplings are on. Infinity for n = 1 without
/// single terms.
inline double min_separation(const ModelParams& params, std::span<const double> q) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = q.size();
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j + 1; k < n; ++k) {
      best = std::min(best, std::fabs(q[j] - q[k]));
      if (params.has_reflection_terms()) best = std::min(best, std::fabs(q[j] + q[k]));
    }
    if (params.g1sq > 0.0) best = std::min(best, std::fabs(q[j]));
    if (params.g2sq_single > 0.0) best = std::min(best, std::fabs(2.0 * q[j]));
  }
  return best;
}

inline void require_separated(const ModelParams& params, std::span<const double> q) {
  const double sep = min_separation(params, q);
  if (!(sep >= params.separation_floor)) {
    throw SingularConfiguration("configuration is singular: min separation " +
                                std::to_string(sep) + " below floor");
  }
}

/// U(q) including the harmonic trap.
inline double potential_energy(const ModelParams& params, std::span<const double> q) {
  detail::require_length(params, q);
  require_separated(params, q);
  using detail::inv_square;
  const std::size_t n = q.size();
  double pair = 0.0;
  double single = 0.0;
  double trap = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j + 1; k < n; ++k) {
      pair += inv_square(q[j] - q[k]);
      if (params.epsilon == 1) pair += inv_square(q[j] + q[k]);
    }
    if (params.g1sq > 0.0) single += params.g1sq * inv_square(q[j]);
    if (params.g2sq_single > 0.0) single += params.g2sq_single * inv_square(2.0 * q[j]);
    trap += q[j] * q[j];
  }
  return params.g2 * pair + single + 0.5 * params.omega * params.omega * trap;
}

inline double kinetic_energy(std::span<const double> p) {
  return 0.5 * std::inner_product(p.begin(), p.end(), p.begin(), 0.0);
}

inline double hamiltonian(const ModelParams& params, const PhaseState& state) {
  detail::require_state(params, state);
  return kinetic_energy(state.p) + potential_energy(params, state.q);
}

/// -dU/dq, term by term.
inline std::vector<double> forces(const ModelParams& params, std::span<const double> q) {
  detail::require_length(params, q);
  require_separated(params, q);
  using detail::inv_cube;
  const std::size_t n = q.size();
  const double w2 = params.omega * params.omega;
  std::vector<double> f(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j + 1; k < n; ++k) {
      // d/dx x^-2 = -2 x^-3
      double c = 2.0 * params.g2 * inv_cube(q[j] - q[k]);
      f[j] += c;
      f[k] -= c;
      if (params.epsilon == 1) {
        const double s = 2.0 * params.g2 * inv_cube(q[j] + q[k]);
        f[j] += s;
        f[k] += s;
      }
    }
    if (params.g1sq > 0.0) f[j] += 2.0 * params.g1sq * inv_cube(q[j]);
    if (params.g2sq_single > 0.0) f[j] += 0.5 * params.g2sq_single * inv_cube(q[j]);
    f[j] -= w2 * q[j];
  }
  return f;
}

/// (dq/dt, dp/dt) = (p, -dU/dq).
inline std::pair<std::vector<double>, std::vector<double>> hamilton_rhs(const ModelParams& params,
                                                                       const PhaseState& state) {
  detail::require_state(params, state);
  return {state.p, forces(params, state.q)};
}

/// Shift positions (and momenta) so that both sum to zero.
inline PhaseState center_of_mass_projection(PhaseState state) {
  auto center = [](std::vector<double>& v) {
    if (v.empty()) return;
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    for (auto& x : v) x -= mean;
  };
  center(state.q);
  center(state.p);
  return state;
}

}  // namespace laxflow

#endif  // LAXFLOW_MODEL_HPP
