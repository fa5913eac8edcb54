#ifndef LAXFLOW_DYNAMICS_HPP
#define LAXFLOW_DYNAMICS_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "laxflow/errors.hpp"
#include "laxflow/invariants.hpp"
#include "laxflow/model.hpp"
#include "laxflow/trajectory.hpp"

namespace laxflow {

/// Kick-drift-kick step for H = T(p) + U(q).
inline PhaseState step_leapfrog(const ModelParams& params, const PhaseState& state, double dt) {
  detail::require_state(params, state);
  PhaseState out = state;
  if (dt == 0.0) return out;
  const std::size_t n = out.q.size();
  const double half = 0.5 * dt;
  auto f = forces(params, out.q);
  for (std::size_t j = 0; j < n; ++j) out.p[j] += half * f[j];
  for (std::size_t j = 0; j < n; ++j) out.q[j] += dt * out.p[j];
  f = forces(params, out.q);
  for (std::size_t j = 0; j < n; ++j) out.p[j] += half * f[j];
  out.t += dt;
  return out;
}

/// Fourth-order triple-jump composition of leapfrog.
struct YoshidaCoefficients {
  static inline const double w1 = 1.0 / (2.0 - std::cbrt(2.0));
  static inline const double w0 = 1.0 - 2.0 * w1;
};

inline PhaseState step_yoshida4(const ModelParams& params, const PhaseState& state, double dt) {
  if (dt == 0.0) {
    detail::require_state(params, state);
    return state;
  }
  const double t0 = state.t;
  PhaseState s = step_leapfrog(params, state, YoshidaCoefficients::w1 * dt);
  s = step_leapfrog(params, s, YoshidaCoefficients::w0 * dt);
  s = step_leapfrog(params, s, YoshidaCoefficients::w1 * dt);
  s.t = t0 + dt;
  return s;
}

inline PhaseState step(Scheme scheme, const ModelParams& params, const PhaseState& state,
                       double dt) {
  return scheme == Scheme::Leapfrog2 ? step_leapfrog(params, state, dt)
                                     : step_yoshida4(params, state, dt);
}

struct IntegrateOptions {
  double t_end = 0.0;
  double dt = 1e-3;
  Scheme scheme = Scheme::Yoshida4;
  int record_every = 1;
  int kmax = 0;
  int max_halvings = 20;
  /// A step is rejected if it brings min_separation below guard_factor * floor.
  double guard_factor = 10.0;
};

namespace detail {

inline bool ordering_preserved(const std::vector<double>& before, const std::vector<double>& after) {
  for (std::size_t j = 0; j < before.size(); ++j) {
    for (std::size_t k = j + 1; k < before.size(); ++k) {
      if ((before[j] < before[k]) != (after[j] < after[k])) return false;
    }
  }
  return true;
}

inline void require_finite(const PhaseState& s) {
  if (!s.finite()) throw NonFinite("state left the finite range at t = " + std::to_string(s.t));
}

}  // namespace detail

/// Integrates from state0.t to t_end. The last step is shortened so the final
/// sample lands on t_end exactly. A nominal step that would cross the
/// separation guard (or reorder particles when epsilon = 0) is redone as 2^m
/// substeps, m = 1..max_halvings; the nominal dt is restored afterwards.
inline Trajectory integrate(const ModelParams& params, const PhaseState& state0,
                            const IntegrateOptions& opt) {
  params.validate();
  detail::require_state(params, state0);
  detail::require_finite(state0);
  require_separated(params, state0.q);
  if (!(opt.t_end > state0.t)) throw ConfigError("integrate: t_end must exceed the start time");
  if (!(opt.dt > 0.0) || !std::isfinite(opt.dt)) throw ConfigError("integrate: dt must be > 0");
  if (opt.record_every < 1) throw ConfigError("integrate: record_every must be >= 1");
  if (opt.kmax < 0) throw BadOrder("integrate: kmax must be >= 0");
  if (params.lax_supported() && opt.kmax > 0)
    detail::require_order(opt.kmax, state0.q.size());

  Trajectory traj;
  traj.params = params;
  traj.dt = opt.dt;
  traj.scheme = opt.scheme;
  traj.kmax = params.lax_supported() ? opt.kmax : 0;
  traj.step_stats.min_separation = min_separation(params, state0.q);

  const double span = opt.t_end - state0.t;
  const auto steps = static_cast<long>(std::ceil(span / opt.dt - 1e-9));
  const double guard = opt.guard_factor * params.separation_floor;
  // Without pair repulsion free particles legitimately pass through each other.
  const bool track_order = params.epsilon == 0 && params.g2 > 0.0;

  auto record = [&](const PhaseState& s) { traj.samples.push_back({s, make_record(params, s, traj.kmax)}); };

  // One substep; returns false when the guard rejects it.
  auto try_substep = [&](const PhaseState& from, double h, PhaseState& to) {
    try {
      to = step(opt.scheme, params, from, h);
    } catch (const SingularConfiguration&) {
      return false;
    }
    detail::require_finite(to);
    const double sep = min_separation(params, to.q);
    if (!(sep >= guard)) return false;
    if (track_order && !detail::ordering_preserved(from.q, to.q)) return false;
    traj.step_stats.min_separation = std::min(traj.step_stats.min_separation, sep);
    return true;
  };

  record(state0);
  PhaseState state = state0;
  for (long i = 0; i < steps; ++i) {
    const bool last = i + 1 == steps;
    const double target = last ? opt.t_end : state0.t + static_cast<double>(i + 1) * opt.dt;
    const double nominal = target - state.t;

    bool accepted = false;
    for (int level = 0; level <= opt.max_halvings && !accepted; ++level) {
      const long substeps = 1L << level;
      const double h = nominal / static_cast<double>(substeps);
      PhaseState s = state;
      bool ok = true;
      for (long m = 0; m < substeps && ok; ++m) {
        PhaseState next;
        ok = try_substep(s, h, next);
        if (ok) s = std::move(next);
      }
      if (ok) {
        s.t = target;
        state = std::move(s);
        traj.step_stats.accepted += 1;
        accepted = true;
      } else {
        traj.step_stats.rejected += 1;
      }
    }
    if (!accepted)
      throw SingularConfiguration("integrate: step halving exhausted near t = " +
                                  std::to_string(state.t));

    if (last || (i + 1) % opt.record_every == 0) record(state);
  }
  return traj;
}

inline Trajectory integrate(const ModelParams& params, const PhaseState& state0, double t_end,
                            double dt, Scheme scheme, int record_every, int kmax) {
  IntegrateOptions opt;
  opt.t_end = t_end;
  opt.dt = dt;
  opt.scheme = scheme;
  opt.record_every = record_every;
  opt.kmax = kmax;
  return integrate(params, state0, opt);
}

/// State at time t from the samples: exact sample if one sits on t, otherwise
/// cubic Hermite interpolation per coordinate using dq/dt = p, dp/dt = F(q).
/// The interpolation error is O(spacing^4).
inline PhaseState state_at(const Trajectory& traj, double t) {
  if (traj.empty()) throw SpanTooShort("empty trajectory");
  const double t0 = traj.front().state.t;
  const double t1 = traj.back().state.t;
  const double slack = 1e-12 * std::max(1.0, std::fabs(t));
  if (t < t0 - slack || t > t1 + slack) throw SpanTooShort("time outside trajectory span");
  const auto& samples = traj.samples;
  auto it = std::lower_bound(samples.begin(), samples.end(), t,
                             [](const Sample& s, double v) { return s.state.t < v; });
  if (it != samples.end() && std::fabs(it->state.t - t) <= slack) return it->state;
  if (it != samples.begin() && std::fabs(std::prev(it)->state.t - t) <= slack)
    return std::prev(it)->state;
  if (it == samples.end()) return samples.back().state;
  if (it == samples.begin()) return samples.front().state;

  const PhaseState& a = std::prev(it)->state;
  const PhaseState& b = it->state;
  const double h = b.t - a.t;
  const double s = (t - a.t) / h;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  const double h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s);
  const double h11 = s * s * (s - 1);
  const auto fa = forces(traj.params, a.q);
  const auto fb = forces(traj.params, b.q);
  PhaseState out;
  out.t = t;
  const std::size_t n = a.q.size();
  out.q.resize(n);
  out.p.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    out.q[j] = h00 * a.q[j] + h10 * h * a.p[j] + h01 * b.q[j] + h11 * h * b.p[j];
    out.p[j] = h00 * a.p[j] + h10 * h * fa[j] + h01 * b.p[j] + h11 * h * fb[j];
  }
  return out;
}

inline double period_of(double omega) { return 2.0 * std::numbers::pi / omega; }

/// ||q(t0 + T) - q(t0)||_inf + ||p(t0 + T) - p(t0)||_inf with T = 2 pi / omega.
inline double period_check(const Trajectory& traj, double omega) {
  if (!(omega > 0.0)) throw ConfigError("period_check: omega must be > 0");
  if (traj.empty()) throw SpanTooShort("period_check: empty trajectory");
  const PhaseState& start = traj.front().state;
  const double target = start.t + period_of(omega);
  if (traj.back().state.t < target - 1e-12 * std::max(1.0, target))
    throw SpanTooShort("period_check: trajectory shorter than one period");
  const PhaseState end = state_at(traj, target);
  double dq = 0.0;
  double dp = 0.0;
  for (std::size_t j = 0; j < start.q.size(); ++j) {
    dq = std::max(dq, std::fabs(end.q[j] - start.q[j]));
    dp = std::max(dp, std::fabs(end.p[j] - start.p[j]));
  }
  return dq + dp;
}

/// Largest componentwise |a_j - b_j|.
inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) d = std::max(d, std::fabs(a[j] - b[j]));
  return d;
}

}  // namespace laxflow

#endif  // LAXFLOW_DYNAMICS_HPP
