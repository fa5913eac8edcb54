#ifndef LAXFLOW_LAX_HPP
#define LAXFLOW_LAX_HPP

#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "laxflow/dense_matrix.hpp"
#include "laxflow/errors.hpp"
#include "laxflow/model.hpp"

namespace laxflow {

/// Lax matrices of the rational pair model at one phase point.
///
///   L_jk  = p_j delta_jk + i g / (q_j - q_k)                 (j != k)
///   M_jk  = -i g / (q_j - q_k)^2  (j != k),   M_jj = i g sum_{l != j} 1/(q_j - q_l)^2
///   Lt    = L - i omega Q
///   N     = L^2 + omega^2 Q^2
///
/// With this normalisation dLt/dt = [Lt, M] - i omega Lt and L = P + [M, Q].
/// iM = -D + Y splits into its diagonal D and off-diagonal Y parts; only M
/// as a whole is exposed.
template <class Real = double>
struct LaxSet {
  using Complex = std::complex<Real>;
  using Matrix = BasicComplexMatrix<Real>;

  Matrix P;
  Matrix Q;
  Matrix X;
  Matrix L;
  Matrix M;
  Matrix Ltilde;
  Matrix N;
  Real omega{};

  std::size_t dim() const noexcept { return L.dim(); }
};

namespace detail {

inline void require_lax(const ModelParams& params) {
  if (!params.lax_supported()) throw UnsupportedModel();
}

/// Off-diagonal part X_jk = g / (q_j - q_k) as a real antisymmetric matrix.
template <class Real>
BasicComplexMatrix<Real> lax_offdiagonal(Real g, std::span<const double> q) {
  const std::size_t n = q.size();
  BasicComplexMatrix<Real> x(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      if (j == k) continue;
      x(j, k) = g / (Real(q[j]) - Real(q[k]));
    }
  }
  return x;
}

}  // namespace detail

/// Lax matrix with an arbitrary complex diagonal: L(d, q)_jk = d_j delta_jk + i X_jk.
/// With d_j = p_j - i omega q_j this is Lt; the substitution p -> b.
template <class Real = double>
BasicComplexMatrix<Real> lax_matrix_with_diagonal(const ModelParams& params,
                                                  std::span<const double> q,
                                                  std::span<const std::complex<Real>> diagonal) {
  detail::require_lax(params);
  detail::require_length(params, q);
  if (diagonal.size() != q.size()) throw DimensionMismatch("diagonal length differs from n");
  require_separated(params, q);
  using Complex = std::complex<Real>;
  const Real g = real_sqrt(Real(params.g2));
  auto l = detail::lax_offdiagonal<Real>(g, q);
  l *= Complex(0, 1);
  for (std::size_t j = 0; j < q.size(); ++j) l(j, j) = diagonal[j];
  return l;
}

template <class Real = double>
LaxSet<Real> build_lax(const ModelParams& params, const PhaseState& state) {
  detail::require_lax(params);
  detail::require_state(params, state);
  require_separated(params, state.q);

  using Complex = std::complex<Real>;
  using Matrix = BasicComplexMatrix<Real>;
  const std::size_t n = state.q.size();
  const Real g = real_sqrt(Real(params.g2));
  const Real omega = Real(params.omega);
  const Complex i(0, 1);

  LaxSet<Real> lax;
  lax.omega = omega;
  lax.P = Matrix::diagonal(std::span<const double>(state.p));
  lax.Q = Matrix::diagonal(std::span<const double>(state.q));
  lax.X = detail::lax_offdiagonal<Real>(g, state.q);
  lax.L = lax.P + lax.X * i;

  lax.M = Matrix(n);
  for (std::size_t j = 0; j < n; ++j) {
    Real diag{};
    for (std::size_t k = 0; k < n; ++k) {
      if (j == k) continue;
      const Real r = Real(state.q[j]) - Real(state.q[k]);
      const Real inv_r2 = Real(1) / (r * r);
      lax.M(j, k) = Complex(0, -g * inv_r2);
      diag += inv_r2;
    }
    lax.M(j, j) = Complex(0, g * diag);
  }

  lax.Ltilde = lax.L - lax.Q * Complex(0, omega);
  lax.N = lax.L * lax.L + lax.Q * lax.Q * Complex(omega * omega);
  return lax;
}

/// max |L - P - [M, Q]|.
template <class Real>
double check_commutator_identity(const LaxSet<Real>& lax) {
  return max_abs(lax.L - lax.P - commutator(lax.M, lax.Q));
}

/// max |(Lt^+ Lt + Lt Lt^+)/2 - (L^2 + omega^2 Q^2)|.
template <class Real>
double check_N_identity(const LaxSet<Real>& lax) {
  using Complex = std::complex<Real>;
  const auto lt_dag = lax.Ltilde.adjoint();
  const auto sym = (lt_dag * lax.Ltilde + lax.Ltilde * lt_dag) * Complex(Real(0.5));
  const auto direct = lax.L * lax.L + lax.Q * lax.Q * Complex(lax.omega * lax.omega);
  return max_abs(sym - direct);
}

struct HermiticityResiduals {
  double L = 0.0;
  double iM = 0.0;
  double N = 0.0;
};

template <class Real>
HermiticityResiduals hermiticity_residuals(const LaxSet<Real>& lax) {
  using Complex = std::complex<Real>;
  return {hermiticity_defect(lax.L), hermiticity_defect(lax.M * Complex(0, 1)),
          hermiticity_defect(lax.N)};
}

/// Classical fourth-order Runge-Kutta step of Hamilton's equations. Used only
/// for finite-difference flow checks, independent of the symplectic schemes.
inline PhaseState rk4_step(const ModelParams& params, const PhaseState& state, double h) {
  const std::size_t n = state.q.size();
  auto shifted = [&](const std::vector<double>& dq, const std::vector<double>& dp, double c) {
    PhaseState s = state;
    for (std::size_t j = 0; j < n; ++j) {
      s.q[j] += c * dq[j];
      s.p[j] += c * dp[j];
    }
    return s;
  };
  const auto [k1q, k1p] = hamilton_rhs(params, state);
  const auto [k2q, k2p] = hamilton_rhs(params, shifted(k1q, k1p, 0.5 * h));
  const auto [k3q, k3p] = hamilton_rhs(params, shifted(k2q, k2p, 0.5 * h));
  const auto [k4q, k4p] = hamilton_rhs(params, shifted(k3q, k3p, h));
  PhaseState out = state;
  for (std::size_t j = 0; j < n; ++j) {
    out.q[j] += h / 6.0 * (k1q[j] + 2.0 * k2q[j] + 2.0 * k3q[j] + k4q[j]);
    out.p[j] += h / 6.0 * (k1p[j] + 2.0 * k2p[j] + 2.0 * k3p[j] + k4p[j]);
  }
  out.t += h;
  return out;
}

struct LaxFlowResidual {
  double ltilde = 0.0;  ///< dLt/dt vs [Lt, M] - i omega Lt
  double n = 0.0;       ///< dN/dt vs [N, M]
};

struct ProductFlowResidual {
  double n1 = 0.0;  ///< d(Lt^+ Lt)/dt vs [N1, M]
  double n2 = 0.0;  ///< d(Lt Lt^+)/dt vs [N2, M]
};

namespace detail {

struct FlowBracket {
  LaxSet<double> center;
  LaxSet<double> plus;
  LaxSet<double> minus;
};

inline FlowBracket flow_bracket(const ModelParams& params, const PhaseState& state, double h) {
  require_lax(params);
  if (!(h > 0.0)) throw ConfigError("finite-difference step must be > 0");
  return {build_lax(params, state), build_lax(params, rk4_step(params, state, h)),
          build_lax(params, rk4_step(params, state, -h))};
}

inline ComplexMatrix central_difference(const ComplexMatrix& plus, const ComplexMatrix& minus,
                                        double h) {
  return (plus - minus) * std::complex<double>(1.0 / (2.0 * h));
}

}  // namespace detail

/// Central-difference residuals of the deformed Lax flow and the N flow.
/// Both scale as h^2.
inline LaxFlowResidual lax_flow_residual(const ModelParams& params, const PhaseState& state,
                                         double h) {
  const auto fb = detail::flow_bracket(params, state, h);
  const auto& c = fb.center;
  const std::complex<double> iw(0.0, params.omega);

  const auto dlt = detail::central_difference(fb.plus.Ltilde, fb.minus.Ltilde, h);
  const auto lt_rhs = commutator(c.Ltilde, c.M) - c.Ltilde * iw;
  const auto dn = detail::central_difference(fb.plus.N, fb.minus.N, h);
  const auto n_rhs = commutator(c.N, c.M);
  return {max_abs(dlt - lt_rhs), max_abs(dn - n_rhs)};
}

inline ProductFlowResidual flow_residual_N1_N2(const ModelParams& params,
                                               const PhaseState& state, double h) {
  const auto fb = detail::flow_bracket(params, state, h);
  auto n1 = [](const LaxSet<double>& s) { return s.Ltilde.adjoint() * s.Ltilde; };
  auto n2 = [](const LaxSet<double>& s) { return s.Ltilde * s.Ltilde.adjoint(); };
  const auto& c = fb.center;

  const auto d1 = detail::central_difference(n1(fb.plus), n1(fb.minus), h);
  const auto d2 = detail::central_difference(n2(fb.plus), n2(fb.minus), h);
  return {max_abs(d1 - commutator(n1(c), c.M)), max_abs(d2 - commutator(n2(c), c.M))};
}

}  // namespace laxflow

#endif  // LAXFLOW_LAX_HPP
