#ifndef LAXFLOW_EXACT_HPP
#define LAXFLOW_EXACT_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "laxflow/dense_matrix.hpp"
#include "laxflow/dynamics.hpp"
#include "laxflow/errors.hpp"
#include "laxflow/invariants.hpp"
#include "laxflow/lax.hpp"
#include "laxflow/model.hpp"
#include "laxflow/trajectory.hpp"

namespace laxflow {

inline constexpr double kDegenerateGap = 1e-10;

/// Initial Lax data of a harmonic Calogero system. In the frame rotating with M
/// the position matrix obeys d^2Q/dt^2 = -omega^2 Q with dQ/dt = L at t = 0, so
/// the positions at time t are the eigenvalues of
///   A(t) = Q0 cos(omega t) + L0 sin(omega t) / omega      (A(t) = Q0 + L0 t at omega = 0).
struct SpectralSolution {
  ModelParams params;
  ComplexMatrix Q0;
  ComplexMatrix L0;
  double omega = 0.0;
  double t0 = 0.0;

  static SpectralSolution from_state(const ModelParams& params, const PhaseState& state) {
    const auto lax = build_lax(params, state);
    return {params, lax.Q, lax.L, params.omega, state.t};
  }
};

namespace detail {

inline Eigen::MatrixXcd to_eigen(const ComplexMatrix& m) {
  const auto n = static_cast<Eigen::Index>(m.dim());
  Eigen::MatrixXcd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      out(i, j) = m(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  return out;
}

struct SpectralMatrices {
  Eigen::MatrixXcd A;
  Eigen::MatrixXcd dA;
};

inline SpectralMatrices spectral_matrices(const SpectralSolution& sol, double t) {
  const double tau = t - sol.t0;
  const auto q0 = to_eigen(sol.Q0);
  const auto l0 = to_eigen(sol.L0);
  if (sol.omega == 0.0) return {q0 + l0 * tau, l0};
  const double c = std::cos(sol.omega * tau);
  const double s = std::sin(sol.omega * tau);
  return {q0 * c + l0 * (s / sol.omega), -q0 * (sol.omega * s) + l0 * c};
}

inline Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eigensolve(const Eigen::MatrixXcd& a,
                                                                  bool vectors) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
      a, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw EigenFailure("Hermitian eigensolver did not converge");
  return es;
}

}  // namespace detail

/// Ascending eigenvalues of A(t), i.e. the sorted positions.
inline std::vector<double> exact_positions(const SpectralSolution& sol, double t) {
  const auto m = detail::spectral_matrices(sol, t);
  const auto es = detail::eigensolve(m.A, false);
  const auto& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

/// p_j(t) = v_j^+ A'(t) v_j for the j-th ascending eigenpair.
inline std::vector<double> exact_momenta(const SpectralSolution& sol, double t) {
  const auto m = detail::spectral_matrices(sol, t);
  const auto es = detail::eigensolve(m.A, true);
  const auto& ev = es.eigenvalues();
  for (Eigen::Index j = 1; j < ev.size(); ++j) {
    if (ev(j) - ev(j - 1) < kDegenerateGap)
      throw DegenerateSpectrum("eigenvalue gap below threshold at t = " + std::to_string(t));
  }
  const auto& v = es.eigenvectors();
  std::vector<double> p(static_cast<std::size_t>(ev.size()));
  for (Eigen::Index j = 0; j < ev.size(); ++j) {
    p[static_cast<std::size_t>(j)] = (v.col(j).adjoint() * m.dA * v.col(j))(0, 0).real();
  }
  return p;
}

inline PhaseState exact_state(const SpectralSolution& sol, double t) {
  return {exact_positions(sol, t), exact_momenta(sol, t), t};
}

/// Trajectory sampled at the given ascending times, flagged source = "exact".
inline Trajectory exact_trajectory(const SpectralSolution& sol, const std::vector<double>& times,
                                   int kmax = 0) {
  if (!std::is_sorted(times.begin(), times.end()))
    throw ConfigError("exact_trajectory: times must be ascending");
  Trajectory traj;
  traj.params = sol.params;
  traj.source = "exact";
  traj.kmax = kmax;
  for (double t : times) {
    PhaseState s = exact_state(sol, t);
    traj.step_stats.min_separation =
        std::min(traj.step_stats.min_separation, min_separation(sol.params, s.q));
    traj.samples.push_back({s, make_record(sol.params, s, kmax)});
  }
  if (times.size() > 1) traj.dt = times[1] - times[0];
  return traj;
}

struct DiscrepancyPoint {
  double t = 0.0;
  double value = 0.0;
};

/// ||sorted q_numeric(t) - exact_positions(t)||_inf at every sample.
inline std::vector<DiscrepancyPoint> exact_vs_numeric_curve(const Trajectory& numeric) {
  if (numeric.empty()) return {};
  const auto sol = SpectralSolution::from_state(numeric.params, numeric.front().state);
  std::vector<DiscrepancyPoint> curve;
  curve.reserve(numeric.samples.size());
  for (const auto& sample : numeric.samples) {
    auto q = sample.state.q;
    std::sort(q.begin(), q.end());
    curve.push_back({sample.state.t, max_abs_diff(q, exact_positions(sol, sample.state.t))});
  }
  return curve;
}

inline double max_discrepancy(const std::vector<DiscrepancyPoint>& curve) {
  double worst = 0.0;
  for (const auto& pt : curve) worst = std::max(worst, pt.value);
  return worst;
}

/// Integrates with Yoshida4 and returns the worst position discrepancy against
/// the spectral solution.
inline double compare_exact_vs_numeric(const ModelParams& params, const PhaseState& state0,
                                       double t_end, double dt, int record_every = 10) {
  detail::require_lax(params);
  const auto traj = integrate(params, state0, t_end, dt, Scheme::Yoshida4, record_every, 0);
  return max_discrepancy(exact_vs_numeric_curve(traj));
}

}  // namespace laxflow

#endif  // LAXFLOW_EXACT_HPP
