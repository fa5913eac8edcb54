#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "laxflow/dynamics.hpp"
#include "laxflow/invariants.hpp"
#include "laxflow/random_state.hpp"
#include "oracles.hpp"
#include "support.hpp"

using laxflow::PhaseState;
using cplx = std::complex<double>;

namespace {

const PhaseState kPair{{-1.0, 1.0}, {0.0, 0.0}, 0.0};

/// B_k = tr(Lt^k) from the oracle matrices; I_k = tr((L^2 + w^2 Q^2)^k).
cplx oracle_B(double g2, double omega, const PhaseState& s, int k) {
  return oracle::trace_power(oracle::lax_L(g2, s.q, s.p, omega), k);
}

double oracle_I(double g2, double omega, const PhaseState& s, int k) {
  auto n = oracle::mul(oracle::lax_L(g2, s.q, s.p), oracle::lax_L(g2, s.q, s.p));
  for (std::size_t j = 0; j < s.q.size(); ++j) n[j][j] += omega * omega * s.q[j] * s.q[j];
  return oracle::trace_power(n, k).real();
}

laxflow::Gradient<cplx> coordinate_gradient(std::size_t n, std::size_t j, bool momentum) {
  laxflow::Gradient<cplx> g{std::vector<cplx>(n), std::vector<cplx>(n)};
  (momentum ? g.dp : g.dq)[j] = 1.0;
  return g;
}

laxflow::Gradient<cplx> random_gradient(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  laxflow::Gradient<cplx> g;
  for (std::size_t j = 0; j < n; ++j) {
    g.dp.emplace_back(u(rng), u(rng));
    g.dq.emplace_back(u(rng), u(rng));
  }
  return g;
}

}  // namespace

TEST(Traces, TwoParticleHandValues) {
  const auto m = support::calogero(2, 1, 1);
  const auto lax = laxflow::build_lax(m, kPair);
  const auto b = laxflow::compute_B(lax, 2);
  EXPECT_LT(std::abs(b[0]), 1e-15);
  EXPECT_LT(std::abs(b[1] - cplx(-1.5)), 1e-14);
  EXPECT_NEAR(laxflow::compute_I(lax, 1)[0], 2.5, 1e-14);
  const auto i0 = laxflow::compute_I0(lax, 2);
  EXPECT_NEAR(i0[0], 0.0, 1e-15);
  EXPECT_NEAR(i0[1], 0.5, 1e-14);
}

TEST(Traces, MatchIndependentOracle) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 6;
    const auto m = support::calogero(n, 0.8, 0.9);
    const auto s = laxflow::generate_state(m, {}, rng());
    const auto lax = laxflow::build_lax(m, s);
    const auto b = laxflow::compute_B(lax, 2 * n);
    const auto i = laxflow::compute_I(lax, n);
    for (int k = 1; k <= 2 * n; ++k) {
      const auto ref = oracle_B(m.g2, m.omega, s, k);
      EXPECT_LT(std::abs(b[static_cast<std::size_t>(k - 1)] - ref), 1e-11 * std::max(1.0, std::abs(ref)));
    }
    for (int k = 1; k <= n; ++k) {
      const double ref = oracle_I(m.g2, m.omega, s, k);
      EXPECT_NEAR(i[static_cast<std::size_t>(k - 1)], ref, 1e-11 * std::max(1.0, std::fabs(ref)));
    }
  }
}

TEST(Traces, ClosedFormSpecialCases) {
  const auto m = support::calogero(4, 1.0, 0.7);
  const auto s = laxflow::generate_state(m, {}, 5);
  const auto b1 = laxflow::compute_B(laxflow::build_lax(m, s), 1)[0];
  cplx expect = 0;
  for (std::size_t j = 0; j < 4; ++j) expect += cplx(s.p[j], -m.omega * s.q[j]);
  EXPECT_LT(std::abs(b1 - expect), 1e-14);

  const auto free = support::calogero(3, 0.0, 0.6);
  const auto fs = laxflow::generate_state(free, {}, 7);
  const auto lax = laxflow::build_lax(free, fs);
  const auto b = laxflow::compute_B(lax, 6);
  const auto i0 = laxflow::compute_I0(lax, 6);
  for (int k = 1; k <= 6; ++k) {
    cplx sb = 0;
    double sp = 0;
    for (std::size_t j = 0; j < 3; ++j) {
      sb += std::pow(cplx(fs.p[j], -free.omega * fs.q[j]), k);
      sp += std::pow(fs.p[j], k);
    }
    EXPECT_LT(std::abs(b[static_cast<std::size_t>(k - 1)] - sb), 1e-13);
    EXPECT_NEAR(i0[static_cast<std::size_t>(k - 1)], sp, 1e-13);
  }

  const auto one = support::calogero(1, 1.0, 1.5);
  const PhaseState os{{0.4}, {-0.7}, 0.0};
  const auto i1 = laxflow::compute_I(laxflow::build_lax(one, os), 2);
  const double e = 0.49 + 2.25 * 0.16;
  EXPECT_NEAR(i1[0], e, 1e-15);
  EXPECT_NEAR(i1[1], e * e, 1e-15);
}

TEST(Traces, WithoutTrapIkEqualsEvenI0) {
  const auto m = support::calogero(4, 1.2, 0.0);
  const auto lax = laxflow::build_lax(m, laxflow::generate_state(m, {}, 3));
  const auto i = laxflow::compute_I(lax, 4);
  const auto i0 = laxflow::compute_I0(lax, 8);
  for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(i[k], i0[2 * k + 1], 1e-10 * std::fabs(i[k]));
}

TEST(Traces, ConjugationRelation) {
  const auto m = support::calogero(5, 1, 1);
  const auto lax = laxflow::build_lax(m, laxflow::generate_state(m, {}, 31));
  const auto b = laxflow::compute_B(lax, 8);
  const auto bdag = laxflow::power_traces(lax.Ltilde.adjoint(), 8);
  for (std::size_t k = 0; k < 8; ++k) EXPECT_LT(std::abs(bdag[k] - std::conj(b[k])), 1e-12 * std::max(1.0, std::abs(b[k])));
}

TEST(Traces, OrderBounds) {
  const auto m = support::calogero(3, 1, 1);
  const auto lax = laxflow::build_lax(m, laxflow::generate_state(m, {}, 1));
  EXPECT_THROW(laxflow::compute_B(lax, 0), laxflow::BadOrder);
  EXPECT_THROW(laxflow::compute_I(lax, 7), laxflow::BadOrder);
  EXPECT_NO_THROW(laxflow::compute_I(lax, 6));
}

TEST(Traces, FirstInvariantIsTwiceTheEnergy) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = support::calogero(1 + trial % 8, 0.5 * (trial % 4), 0.5 * (trial % 3));
    const auto s = laxflow::generate_state(m, {}, rng());
    const double h = laxflow::hamiltonian(m, s);
    const double i1 = laxflow::compute_I(laxflow::build_lax(m, s), 1)[0];
    EXPECT_LE(std::fabs(i1 - 2 * h), 1e-12 * 2 * h);
  }
}

TEST(Gradients, FirstOrderClosedForm) {
  const auto m = support::calogero(4, 1, 0.8);
  const auto g = laxflow::grad_B(m, laxflow::generate_state(m, {}, 3), 1);
  for (std::size_t j = 0; j < 4; ++j) {
    EXPECT_LT(std::abs(g.dp[j] - cplx(1)), 1e-15);
    EXPECT_LT(std::abs(g.dq[j] - cplx(0, -0.8)), 1e-14);
  }
}

TEST(Gradients, DecoupledClosedForm) {
  const auto m = support::calogero(3, 0.0, 1.1);
  const auto s = laxflow::generate_state(m, {}, 9);
  for (int k = 1; k <= 4; ++k) {
    const auto g = laxflow::grad_B(m, s, k);
    for (std::size_t j = 0; j < 3; ++j) {
      const cplx b(s.p[j], -m.omega * s.q[j]);
      EXPECT_LT(std::abs(g.dp[j] - double(k) * std::pow(b, k - 1)), 1e-12);
    }
  }
}

TEST(Gradients, AgreeWithOracleFiniteDifferences) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 2 + trial % 4;
    const auto m = support::calogero(n, 1.0, 1.0);
    const auto s = laxflow::generate_state(m, support::trap_scale(), rng());
    for (int k = 1; k <= n; ++k) {
      const auto gb = laxflow::grad_B(m, s, k);
      const auto gi = laxflow::grad_I(m, s, k);
      double scale_b = 1.0, scale_i = 1.0, err_b = 0.0, err_i = 0.0;
      for (std::size_t j = 0; j < static_cast<std::size_t>(n); ++j) {
        for (int axis = 0; axis < 2; ++axis) {
          auto fb = [&](const std::vector<double>& x) {
            PhaseState t = s;
            (axis == 0 ? t.p : t.q) = x;
            return oracle_B(m.g2, m.omega, t, k);
          };
          auto fi = [&](const std::vector<double>& x) {
            PhaseState t = s;
            (axis == 0 ? t.p : t.q) = x;
            return oracle_I(m.g2, m.omega, t, k);
          };
          const auto& base = axis == 0 ? s.p : s.q;
          const cplx db = oracle::derivative(fb, base, j, 1e-3);
          const double di = oracle::derivative(fi, base, j, 1e-3);
          const cplx ab = axis == 0 ? gb.dp[j] : gb.dq[j];
          const cplx ai = axis == 0 ? gi.dp[j] : gi.dq[j];
          scale_b = std::max(scale_b, std::abs(ab));
          scale_i = std::max(scale_i, std::abs(ai));
          err_b = std::max(err_b, std::abs(ab - db));
          err_i = std::max(err_i, std::abs(ai - di));
        }
      }
      EXPECT_LT(err_b / scale_b, 1e-6) << "B n=" << n << " k=" << k;
      EXPECT_LT(err_i / scale_i, 1e-6) << "I n=" << n << " k=" << k;
    }
  }
}

TEST(Gradients, LibraryFiniteDifferencesAgreeWithAnalytic) {
  const auto m = support::calogero(4, 1, 1);
  const auto s = laxflow::generate_state(m, support::trap_scale(), 12);
  const auto fd = laxflow::fd_invariant_gradients(m, s, 4);
  const auto an = laxflow::invariant_gradients<double>(m, s, 4);
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_LT(laxflow::gradient_relative_error(an.B[k], fd.B[k]), 1e-6);
    EXPECT_LT(laxflow::gradient_relative_error(an.I[k], fd.I[k]), 1e-6);
  }
}

TEST(PoissonBracket, CanonicalPair) {
  const auto p1 = coordinate_gradient(3, 0, true);
  const auto q1 = coordinate_gradient(3, 0, false);
  EXPECT_EQ(laxflow::poisson_bracket(p1, q1), cplx(1));
  EXPECT_EQ(laxflow::poisson_bracket(q1, p1), cplx(-1));
  EXPECT_EQ(laxflow::poisson_bracket(p1, coordinate_gradient(3, 1, false)), cplx(0));
}

TEST(PoissonBracket, AntisymmetricAndBilinear) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const auto f = random_gradient(5, rng), g = random_gradient(5, rng), h = random_gradient(5, rng);
    EXPECT_EQ(laxflow::poisson_bracket(f, f), cplx(0));
    EXPECT_LT(std::abs(laxflow::poisson_bracket(f, g) + laxflow::poisson_bracket(g, f)), 1e-15);
    const cplx a(0.3, -1.2), b(2.0, 0.5);
    laxflow::Gradient<cplx> combo;
    for (std::size_t j = 0; j < 5; ++j) {
      combo.dp.push_back(a * f.dp[j] + b * g.dp[j]);
      combo.dq.push_back(a * f.dq[j] + b * g.dq[j]);
    }
    const auto lhs = laxflow::poisson_bracket(combo, h);
    const auto rhs = a * laxflow::poisson_bracket(f, h) + b * laxflow::poisson_bracket(g, h);
    EXPECT_LT(std::abs(lhs - rhs), 1e-13);
  }
}

TEST(PoissonBracket, LengthMismatchThrows) {
  EXPECT_THROW(laxflow::poisson_bracket(coordinate_gradient(2, 0, true), coordinate_gradient(3, 0, true)),
               laxflow::DimensionMismatch);
}

TEST(Involution, RandomStatesBelowTolerance) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 5;
    const auto m = support::calogero(n, 1, 1);
    const auto r = laxflow::involution_check(m, laxflow::generate_state(m, support::trap_scale(), rng()), n);
    EXPECT_LT(r.max_B(), 1e-8) << n;
    EXPECT_LT(r.max_I(), 1e-8) << n;
  }
}

TEST(Involution, DecoupledAndTrivialCases) {
  const auto free = support::calogero(4, 0.0, 1.0);
  const auto r = laxflow::involution_check(free, laxflow::generate_state(free, {}, 2), 4);
  EXPECT_LT(r.max_B(), 1e-12);
  EXPECT_LT(r.max_I(), 1e-12);
  const auto m = support::calogero(3, 1, 1);
  const auto one = laxflow::involution_check(m, laxflow::generate_state(m, {}, 2), 1);
  ASSERT_EQ(one.B.size(), 1u);
  EXPECT_EQ(one.B[0][0], 0.0);
  EXPECT_EQ(one.I[0][0], 0.0);
}

TEST(Involution, CorruptedGradientsAreDetected) {
  const auto m = support::calogero(4, 1, 1);
  const auto s = laxflow::generate_state(m, support::trap_scale(), 5);
  auto grads = laxflow::invariant_gradients<laxflow::ExtendedReal>(m, s, 4);
  for (auto& v : grads.B[1].dq) v *= laxflow::ExtendedReal(1.01);
  EXPECT_GT(laxflow::involution_from_gradients(grads).max_B(), 1e-8);
}

TEST(PhaseLaw, DecoupledOscillatorsRotateExactly) {
  const auto m = support::calogero(3, 0.0, 1.0);
  const auto s = laxflow::generate_state(m, {}, 3);
  const auto traj = laxflow::integrate(m, s, laxflow::period_of(1.0), 1e-3, laxflow::Scheme::Yoshida4, 10, 3);
  EXPECT_LT(laxflow::phase_evolution_check(traj, 1.0, 3), 1e-9);
}

TEST(PhaseLaw, InteractingThreeBodyOnePeriod) {
  const auto m = support::calogero(3, 1.0, 1.0);
  const auto s = laxflow::generate_state(m, {}, 10);
  const auto traj = laxflow::integrate(m, s, laxflow::period_of(1.0), 1e-3, laxflow::Scheme::Yoshida4, 10, 3);
  EXPECT_LT(laxflow::phase_evolution_check(traj, 1.0, 3), 1e-6);
  EXPECT_GT(laxflow::phase_evolution_check(traj, 1.01, 3), 1e-3);
}

TEST(Conservation, TenPeriodsYoshida) {
  for (int n = 2; n <= 6; ++n) {
    const auto m = support::calogero(n, 1, 1);
    const auto s = laxflow::generate_state(m, support::trap_scale(), 200 + static_cast<std::uint64_t>(n));
    const auto traj =
        laxflow::integrate(m, s, 10 * laxflow::period_of(1.0), 1e-3, laxflow::Scheme::Yoshida4, 50, n);
    const auto d = laxflow::drift_stats(traj);
    EXPECT_LT(d.H, 1e-8) << n;
    EXPECT_LT(d.max_I(), 1e-8) << n;
  }
}
