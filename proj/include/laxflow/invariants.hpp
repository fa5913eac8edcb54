#ifndef LAXFLOW_INVARIANTS_HPP
#define LAXFLOW_INVARIANTS_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "laxflow/dense_matrix.hpp"
#include "laxflow/errors.hpp"
#include "laxflow/lax.hpp"
#include "laxflow/model.hpp"
#include "laxflow/trajectory.hpp"

namespace laxflow {

/// Scalar used where cancellation would otherwise swamp an exact zero
/// (Poisson brackets of high power traces).
#if defined(__SIZEOF_FLOAT128__)
__extension__ typedef __float128 ExtendedReal;
#else
using ExtendedReal = long double;
#endif

inline constexpr double kImaginaryTolerance = 1e-12;

namespace detail {

inline void require_order(int kmax, std::size_t n) {
  if (kmax < 1) throw BadOrder("power order kmax must be >= 1");
  if (static_cast<std::size_t>(kmax) > 2 * n) throw BadOrder("power order kmax must be <= 2n");
}

template <class Real>
std::vector<double> real_traces(const BasicComplexMatrix<Real>& hermitian, int kmax) {
  const auto traces = power_traces(hermitian, kmax);
  std::vector<double> out;
  out.reserve(traces.size());
  for (const auto& tr : traces) {
    const double re = static_cast<double>(tr.real());
    const double im = static_cast<double>(tr.imag());
    if (std::fabs(im) > kImaginaryTolerance * std::max(1.0, std::fabs(re)))
      throw ImaginaryContamination("trace of Hermitian power has imaginary part " +
                                   std::to_string(im));
    out.push_back(re);
  }
  return out;
}

}  // namespace detail

/// B_k = tr(Lt^k), k = 1..kmax.
template <class Real>
std::vector<std::complex<double>> compute_B(const LaxSet<Real>& lax, int kmax) {
  detail::require_order(kmax, lax.dim());
  std::vector<std::complex<double>> out;
  for (const auto& tr : power_traces(lax.Ltilde, kmax))
    out.emplace_back(static_cast<double>(tr.real()), static_cast<double>(tr.imag()));
  return out;
}

/// Conserved I_k = tr(N^k).
template <class Real>
std::vector<double> compute_I(const LaxSet<Real>& lax, int kmax) {
  detail::require_order(kmax, lax.dim());
  return detail::real_traces(lax.N, kmax);
}

/// omega-free traces I0_k = tr(L^k).
template <class Real>
std::vector<double> compute_I0(const LaxSet<Real>& lax, int kmax) {
  detail::require_order(kmax, lax.dim());
  return detail::real_traces(lax.L, kmax);
}

/// Full snapshot. Lax data is filled only when the model supports it and kmax > 0.
inline InvariantRecord make_record(const ModelParams& params, const PhaseState& state, int kmax) {
  InvariantRecord rec;
  rec.t = state.t;
  rec.H = hamiltonian(params, state);
  if (params.lax_supported() && kmax > 0) {
    const auto lax = build_lax(params, state);
    rec.B = compute_B(lax, kmax);
    rec.I = compute_I(lax, kmax);
    rec.I0 = compute_I0(lax, kmax);
  }
  return rec;
}

/// Gradient pair (dF/dp, dF/dq).
template <class T>
struct Gradient {
  std::vector<T> dp;
  std::vector<T> dq;
};

/// {F, G} = sum_k dF/dp_k dG/dq_k - dF/dq_k dG/dp_k.
template <class T>
T poisson_bracket(const Gradient<T>& f, const Gradient<T>& g) {
  const std::size_t n = f.dp.size();
  if (f.dq.size() != n || g.dp.size() != n || g.dq.size() != n)
    throw DimensionMismatch("poisson_bracket: gradient lengths differ");
  T sum{};
  for (std::size_t j = 0; j < n; ++j) sum += f.dp[j] * g.dq[j] - f.dq[j] * g.dp[j];
  return sum;
}

namespace detail {

/// Shared contraction for both gradients: given W and the coefficient matrix
/// S of dL/dq_j (tr(S dL/dq_j)), returns
///   sum_{m != j} i g / (q_j - q_m)^2 (S_jm - S_mj).
template <class Real>
std::complex<Real> offdiagonal_contraction(const BasicComplexMatrix<Real>& s, Real g,
                                           std::span<const double> q, std::size_t j) {
  std::complex<Real> acc{};
  for (std::size_t m = 0; m < q.size(); ++m) {
    if (m == j) continue;
    const Real r = Real(q[j]) - Real(q[m]);
    acc += (s(j, m) - s(m, j)) * (g / (r * r));
  }
  return acc * std::complex<Real>(0, 1);
}

}  // namespace detail

/// Analytic gradient of B_k = tr(Lt^k):
///   dB_k/dp_j = k (Lt^{k-1})_jj,  dB_k/dq_j = k tr(Lt^{k-1} dLt/dq_j).
template <class Real = double>
Gradient<std::complex<Real>> grad_B(const ModelParams& params, const PhaseState& state, int k) {
  detail::require_lax(params);
  const auto lax = build_lax<Real>(params, state);
  detail::require_order(k, lax.dim());
  const std::size_t n = lax.dim();
  const Real g = real_sqrt(Real(params.g2));
  const std::complex<Real> kk(static_cast<Real>(k));
  const std::complex<Real> iw(0, Real(params.omega));

  const auto w = matrix_powers(lax.Ltilde, k - 1).back();
  Gradient<std::complex<Real>> grad;
  grad.dp.resize(n);
  grad.dq.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    grad.dp[j] = kk * w(j, j);
    grad.dq[j] = kk * (detail::offdiagonal_contraction(w, g, state.q, j) - iw * w(j, j));
  }
  return grad;
}

/// Analytic gradient of I_k = tr(N^k) by the chain rule through N = L^2 + omega^2 Q^2:
///   dI_k/dx = k tr(N^{k-1} dN/dx),   S = N^{k-1} L + L N^{k-1}.
template <class Real = double>
Gradient<std::complex<Real>> grad_I(const ModelParams& params, const PhaseState& state, int k) {
  detail::require_lax(params);
  const auto lax = build_lax<Real>(params, state);
  detail::require_order(k, lax.dim());
  const std::size_t n = lax.dim();
  const Real g = real_sqrt(Real(params.g2));
  const Real w2 = Real(params.omega) * Real(params.omega);
  const std::complex<Real> kk(static_cast<Real>(k));

  const auto w = matrix_powers(lax.N, k - 1).back();
  const auto s = w * lax.L + lax.L * w;
  Gradient<std::complex<Real>> grad;
  grad.dp.resize(n);
  grad.dq.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    grad.dp[j] = kk * s(j, j);
    const std::complex<Real> trap = w(j, j) * (Real(2) * w2 * Real(state.q[j]));
    grad.dq[j] = kk * (detail::offdiagonal_contraction(s, g, state.q, j) + trap);
  }
  return grad;
}

struct InvolutionReport {
  std::vector<std::vector<double>> B;  ///< |{B_k, B_l}|
  std::vector<std::vector<double>> I;  ///< |{I_k, I_l}|

  double max_B() const { return max_of(B); }
  double max_I() const { return max_of(I); }

 private:
  static double max_of(const std::vector<std::vector<double>>& m) {
    double best = 0.0;
    for (const auto& row : m)
      for (double v : row) best = std::max(best, v);
    return best;
  }
};

template <class Real>
struct InvariantGradients {
  std::vector<Gradient<std::complex<Real>>> B;  ///< index k-1
  std::vector<Gradient<std::complex<Real>>> I;
};

template <class Real>
InvariantGradients<Real> invariant_gradients(const ModelParams& params, const PhaseState& state,
                                             int kmax) {
  detail::require_lax(params);
  detail::require_order(kmax, state.q.size());
  InvariantGradients<Real> out;
  for (int k = 1; k <= kmax; ++k) {
    out.B.push_back(grad_B<Real>(params, state, k));
    out.I.push_back(grad_I<Real>(params, state, k));
  }
  return out;
}

/// Pairwise bracket magnitudes of precomputed gradients.
template <class Real>
InvolutionReport involution_from_gradients(const InvariantGradients<Real>& grads) {
  const auto& gb = grads.B;
  const auto& gi = grads.I;
  if (gb.size() != gi.size()) throw DimensionMismatch("involution: gradient list sizes differ");
  const std::size_t size = gb.size();
  InvolutionReport report;
  report.B.assign(size, std::vector<double>(size, 0.0));
  report.I.assign(size, std::vector<double>(size, 0.0));
  for (std::size_t a = 0; a < size; ++a) {
    for (std::size_t b = 0; b < size; ++b) {
      report.B[a][b] = magnitude(poisson_bracket(gb[a], gb[b]));
      report.I[a][b] = magnitude(poisson_bracket(gi[a], gi[b]));
    }
  }
  return report;
}

/// Bracket matrices |{B_k, B_l}| and |{I_k, I_l}| for k, l <= kmax from
/// analytic gradients evaluated in the scalar type Real.
template <class Real>
InvolutionReport involution_check_in(const ModelParams& params, const PhaseState& state, int kmax) {
  return involution_from_gradients(invariant_gradients<Real>(params, state, kmax));
}

/// Central-difference gradients of B_k and I_k, k = 1..kmax, built from the
/// trace routines alone. Cross-checks the analytic gradients.
inline InvariantGradients<double> fd_invariant_gradients(const ModelParams& params,
                                                         const PhaseState& state, int kmax,
                                                         double h = 1e-6) {
  detail::require_lax(params);
  detail::require_order(kmax, state.q.size());
  const std::size_t n = state.q.size();
  const auto size = static_cast<std::size_t>(kmax);
  InvariantGradients<double> out;
  out.B.assign(size, {std::vector<std::complex<double>>(n), std::vector<std::complex<double>>(n)});
  out.I = out.B;

  auto evaluate = [&](const PhaseState& s) {
    const auto lax = build_lax(params, s);
    return std::pair{compute_B(lax, kmax), compute_I(lax, kmax)};
  };
  for (std::size_t j = 0; j < n; ++j) {
    for (int axis = 0; axis < 2; ++axis) {
      PhaseState plus = state;
      PhaseState minus = state;
      auto& xp = axis == 0 ? plus.p[j] : plus.q[j];
      auto& xm = axis == 0 ? minus.p[j] : minus.q[j];
      xp += h;
      xm -= h;
      const auto [bp, ip] = evaluate(plus);
      const auto [bm, im] = evaluate(minus);
      for (std::size_t k = 0; k < size; ++k) {
        const auto db = (bp[k] - bm[k]) / (2.0 * h);
        const std::complex<double> di((ip[k] - im[k]) / (2.0 * h));
        (axis == 0 ? out.B[k].dp : out.B[k].dq)[j] = db;
        (axis == 0 ? out.I[k].dp : out.I[k].dq)[j] = di;
      }
    }
  }
  return out;
}

/// max_j |a_j - b_j| / max(1, max_j |a_j|) over both components.
template <class T>
double gradient_relative_error(const Gradient<T>& analytic, const Gradient<T>& reference) {
  double scale = 1.0;
  double diff = 0.0;
  for (std::size_t j = 0; j < analytic.dp.size(); ++j) {
    scale = std::max({scale, magnitude(analytic.dp[j]), magnitude(analytic.dq[j])});
    diff = std::max({diff, magnitude(analytic.dp[j] - reference.dp[j]),
                     magnitude(analytic.dq[j] - reference.dq[j])});
  }
  return diff / scale;
}

template <class To, class From>
Gradient<std::complex<To>> gradient_cast(const Gradient<std::complex<From>>& g) {
  Gradient<std::complex<To>> out;
  auto conv = [](const std::complex<From>& v) {
    return std::complex<To>(static_cast<To>(v.real()), static_cast<To>(v.imag()));
  };
  for (const auto& v : g.dp) out.dp.push_back(conv(v));
  for (const auto& v : g.dq) out.dq.push_back(conv(v));
  return out;
}

/// Involution matrices in ExtendedReal. Power traces up to order n reach
/// magnitudes where double-precision cancellation in the bracket sum exceeds
/// the 1e-8 acceptance level for n >= 4.
inline InvolutionReport involution_check(const ModelParams& params, const PhaseState& state,
                                         int kmax) {
  return involution_check_in<ExtendedReal>(params, state, kmax);
}

/// max over samples and k <= kmax of |B_k(t) e^{i k omega (t - t0)} - B_k(t0)| / max(1, |B_k(t0)|).
inline double phase_evolution_check(const Trajectory& traj, double omega, int kmax) {
  if (!traj.params.lax_supported()) throw UnsupportedModel();
  if (traj.empty()) return 0.0;
  const auto& first = traj.front().record;
  if (kmax < 1 || static_cast<std::size_t>(kmax) > first.B.size())
    throw BadOrder("phase_evolution_check: kmax exceeds recorded B_k");
  const double t0 = first.t;
  double worst = 0.0;
  for (const auto& sample : traj.samples) {
    const auto& rec = sample.record;
    for (int k = 1; k <= kmax; ++k) {
      const auto idx = static_cast<std::size_t>(k - 1);
      const auto b0 = first.B[idx];
      const auto rotated = rec.B[idx] * std::polar(1.0, k * omega * (rec.t - t0));
      worst = std::max(worst, std::abs(rotated - b0) / std::max(1.0, std::abs(b0)));
    }
  }
  return worst;
}

/// Drift summary of a trajectory's invariant records, relative to the first sample.
struct DriftStats {
  double H = 0.0;                   ///< max |H - H0| / max(|H0|, tiny)
  std::vector<double> I;            ///< per k: max |I_k - I_k0| / |I_k0|
  std::vector<double> B_modulus;    ///< per k: max ||B_k| - |B_k0|| / max(1, |B_k0|)

  double max_I() const { return I.empty() ? 0.0 : *std::max_element(I.begin(), I.end()); }
  double max_B_modulus() const {
    return B_modulus.empty() ? 0.0 : *std::max_element(B_modulus.begin(), B_modulus.end());
  }
};

inline DriftStats drift_stats(const Trajectory& traj) {
  DriftStats out;
  if (traj.empty()) return out;
  const auto& r0 = traj.front().record;
  const double tiny = std::numeric_limits<double>::min();
  out.I.assign(r0.I.size(), 0.0);
  out.B_modulus.assign(r0.B.size(), 0.0);
  for (const auto& sample : traj.samples) {
    const auto& r = sample.record;
    out.H = std::max(out.H, std::fabs(r.H - r0.H) / std::max(std::fabs(r0.H), tiny));
    for (std::size_t k = 0; k < out.I.size() && k < r.I.size(); ++k)
      out.I[k] = std::max(out.I[k], std::fabs(r.I[k] - r0.I[k]) / std::max(std::fabs(r0.I[k]), tiny));
    for (std::size_t k = 0; k < out.B_modulus.size() && k < r.B.size(); ++k) {
      const double m0 = std::abs(r0.B[k]);
      out.B_modulus[k] =
          std::max(out.B_modulus[k], std::fabs(std::abs(r.B[k]) - m0) / std::max(1.0, m0));
    }
  }
  return out;
}

}  // namespace laxflow

#endif  // LAXFLOW_INVARIANTS_HPP
