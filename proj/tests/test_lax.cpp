#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "laxflow/lax.hpp"
#include "laxflow/random_state.hpp"
#include "oracles.hpp"
#include "support.hpp"

using laxflow::ComplexMatrix;
using laxflow::PhaseState;
using cplx = std::complex<double>;

namespace {

const PhaseState kPair{{-1.0, 1.0}, {0.0, 0.0}, 0.0};

oracle::Mat to_oracle(const ComplexMatrix& m) {
  oracle::Mat out = oracle::zeros(m.dim());
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j) out[i][j] = m(i, j);
  return out;
}

std::vector<double> sorted_eigenvalues(const ComplexMatrix& h) {
  const auto n = static_cast<Eigen::Index>(h.dim());
  Eigen::MatrixXcd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = h(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a, Eigen::EigenvaluesOnly);
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + n);
  std::sort(ev.begin(), ev.end());
  return ev;
}

}  // namespace

TEST(BuildLax, TwoParticleHandValues) {
  const auto lax = laxflow::build_lax(support::calogero(2, 1, 1), kPair);
  EXPECT_LT(laxflow::max_abs_diff(lax.L, ComplexMatrix{{0, cplx(0, -0.5)}, {cplx(0, 0.5), 0}}), 1e-15);
  EXPECT_LT(laxflow::max_abs_diff(lax.Ltilde,
                                  ComplexMatrix{{cplx(0, 1), cplx(0, -0.5)}, {cplx(0, 0.5), cplx(0, -1)}}),
            1e-15);
  EXPECT_NEAR(lax.N.trace().real(), 2.5, 1e-14);
  EXPECT_EQ(laxflow::hermiticity_defect(lax.L), 0.0);
}

TEST(BuildLax, MatchesIndependentConstruction) {
  const auto m = support::calogero(5, 1.7, 0.6);
  const auto s = laxflow::generate_state(m, {}, 21);
  const auto lax = laxflow::build_lax(m, s);
  EXPECT_LT(oracle::max_abs_diff(to_oracle(lax.L), oracle::lax_L(m.g2, s.q, s.p)), 1e-14);
  EXPECT_LT(oracle::max_abs_diff(to_oracle(lax.Ltilde), oracle::lax_L(m.g2, s.q, s.p, m.omega)), 1e-14);
}

TEST(BuildLax, SingleParticle) {
  const auto lax = laxflow::build_lax(support::calogero(1, 1, 2), {{0.5}, {0.3}, 0.0});
  EXPECT_EQ(lax.L(0, 0), cplx(0.3));
  EXPECT_EQ(lax.M(0, 0), cplx(0));
  EXPECT_EQ(lax.Ltilde(0, 0), cplx(0.3, -1.0));
  EXPECT_EQ(laxflow::check_commutator_identity(lax), 0.0);
  const auto h = laxflow::hermiticity_residuals(lax);
  EXPECT_EQ(h.L, 0.0);
  EXPECT_EQ(h.iM, 0.0);
  EXPECT_EQ(h.N, 0.0);
}

TEST(BuildLax, DecoupledCaseIsDiagonal) {
  const auto m = support::calogero(4, 0.0, 0.8);
  const auto s = laxflow::generate_state(m, {}, 2);
  const auto lax = laxflow::build_lax(m, s);
  EXPECT_EQ(lax.L, lax.P);
  EXPECT_EQ(laxflow::max_abs(lax.M), 0.0);
  for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(lax.Ltilde(j, j), cplx(s.p[j], -0.8 * s.q[j]));
}

TEST(BuildLax, RejectsUnsupportedModel) {
  auto m = support::calogero(2, 1, 1);
  m.epsilon = 1;
  m.g1sq = 0.5;
  try {
    (void)laxflow::build_lax(m, kPair);
    FAIL() << "expected UnsupportedModel";
  } catch (const laxflow::UnsupportedModel& e) {
    EXPECT_STREQ(e.what(), "Lax machinery unsupported for this model");
  }
}

TEST(Commutator, IdentityFailsWithoutM) {
  const auto m = support::calogero(2, 1, 1);
  const PhaseState s{{-0.3, 0.9}, {0.1, 0.2}, 0.0};
  auto lax = laxflow::build_lax(m, s);
  lax.M = ComplexMatrix(2);
  EXPECT_NEAR(laxflow::check_commutator_identity(lax), 1.0 / 1.2, 1e-15);
}

TEST(Identities, HoldOverParameterSweep) {
  std::mt19937_64 rng(99);
  double worst_comm = 0.0, worst_n = 0.0, worst_herm = 0.0;
  for (int trial = 0; trial < 400; ++trial) {
    const int n = 1 + trial % 8;
    const double values[] = {0.0, 0.5, 1.0, 10.0};
    const auto m = support::calogero(n, values[trial % 4], values[(trial / 4) % 4]);
    const auto s = laxflow::generate_state(m, {}, rng());
    const auto lax = laxflow::build_lax(m, s);
    worst_comm = std::max(worst_comm, laxflow::check_commutator_identity(lax));
    worst_n = std::max(worst_n, laxflow::check_N_identity(lax));
    const auto h = laxflow::hermiticity_residuals(lax);
    worst_herm = std::max({worst_herm, h.L, h.iM, h.N});
  }
  EXPECT_LT(worst_comm, 1e-12);
  EXPECT_LT(worst_n, 1e-12);
  EXPECT_LT(worst_herm, 1e-13);
}

TEST(Identities, NReducesToLSquaredWithoutTrap) {
  const auto m = support::calogero(5, 1, 0);
  const auto lax = laxflow::build_lax(m, laxflow::generate_state(m, {}, 6));
  EXPECT_LT(laxflow::max_abs_diff(lax.N, lax.L * lax.L), 1e-13);
  EXPECT_LT(laxflow::check_N_identity(lax), 1e-12);
}

TEST(CouplingSign, OppositeRootLeavesTracesInvariant) {
  const auto m = support::calogero(5, 1.3, 0.7);
  const auto lax = laxflow::build_lax(m, laxflow::generate_state(m, {}, 8));
  const cplx i(0, 1);
  const auto l_flip = lax.P - lax.X * i;
  const auto lt_flip = l_flip - lax.Q * cplx(0, m.omega);
  const auto n_flip = l_flip * l_flip + lax.Q * lax.Q * cplx(m.omega * m.omega);
  const auto a = laxflow::power_traces(lax.Ltilde, 10), b = laxflow::power_traces(lt_flip, 10);
  const auto c = laxflow::power_traces(lax.N, 5), d = laxflow::power_traces(n_flip, 5);
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_LT(std::abs(a[k] - b[k]), 1e-10 * std::max(1.0, std::abs(a[k])));
  for (std::size_t k = 0; k < c.size(); ++k) EXPECT_LT(std::abs(c[k] - d[k]), 1e-10 * std::max(1.0, std::abs(c[k])));
}

TEST(Substitution, LaxMatrixWithComplexDiagonalEqualsLtilde) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto m = support::calogero(1 + trial % 8, 1.1, 0.4 + 0.1 * (trial % 5));
    const auto s = laxflow::generate_state(m, {}, rng());
    std::vector<cplx> b;
    for (std::size_t j = 0; j < s.q.size(); ++j) b.emplace_back(s.p[j], -m.omega * s.q[j]);
    const auto sub = laxflow::lax_matrix_with_diagonal<double>(m, s.q, std::span<const cplx>(b));
    EXPECT_EQ(sub, laxflow::build_lax(m, s).Ltilde);
  }
}

TEST(NSpectrum, RealNonNegativeAndPermutationInvariant) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 6;
    const auto m = support::calogero(n, 1.0, 0.5 * (trial % 3));
    auto s = laxflow::generate_state(m, {}, rng());
    const auto ev = sorted_eigenvalues(laxflow::build_lax(m, s).N);
    EXPECT_GE(ev.front(), -1e-10 * std::max(1.0, ev.back()));
    std::vector<std::size_t> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    PhaseState shuffled = s;
    for (std::size_t j = 0; j < perm.size(); ++j) {
      shuffled.q[j] = s.q[perm[j]];
      shuffled.p[j] = s.p[perm[j]];
    }
    const auto ev2 = sorted_eigenvalues(laxflow::build_lax(m, shuffled).N);
    for (std::size_t j = 0; j < ev.size(); ++j) EXPECT_NEAR(ev2[j], ev[j], 1e-10 * std::max(1.0, ev.back()));
  }
}

TEST(Flow, SecondOrderConvergenceAcrossThreeLevels) {
  laxflow::StateGenerator gen;
  gen.center = false;
  for (int n = 2; n <= 6; ++n) {
    const auto m = support::calogero(n, 1, 1);
    const auto s = laxflow::generate_state(m, gen, 100 + static_cast<std::uint64_t>(n));
    const double hs[] = {4e-4, 2e-4, 1e-4};
    laxflow::LaxFlowResidual r[3];
    laxflow::ProductFlowResidual pr[3];
    for (int i = 0; i < 3; ++i) {
      r[i] = laxflow::lax_flow_residual(m, s, hs[i]);
      pr[i] = laxflow::flow_residual_N1_N2(m, s, hs[i]);
    }
    for (int i = 0; i < 2; ++i) {
      EXPECT_NEAR(r[i].ltilde / r[i + 1].ltilde, 4.0, 0.8) << "n=" << n;
      EXPECT_NEAR(r[i].n / r[i + 1].n, 4.0, 0.8) << "n=" << n;
      EXPECT_NEAR(pr[i].n1 / pr[i + 1].n1, 4.0, 0.8) << "n=" << n;
      EXPECT_NEAR(pr[i].n2 / pr[i + 1].n2, 4.0, 0.8) << "n=" << n;
    }
  }
}

TEST(Flow, DecoupledResidualsVanish) {
  const auto m = support::calogero(3, 0.0, 1.0);
  const auto s = laxflow::generate_state(m, {}, 4);
  // Central differences of the pure rotation carry (omega h)^2 / 6 truncation.
  const auto r = laxflow::lax_flow_residual(m, s, 1e-5);
  EXPECT_LT(r.ltilde, 1e-10);
  const auto pr = laxflow::flow_residual_N1_N2(m, s, 1e-5);
  EXPECT_LT(pr.n1, 1e-10);
  EXPECT_LT(pr.n2, 1e-10);
}

TEST(Flow, WithoutTrapProductFlowsCoincide) {
  const auto m = support::calogero(4, 1.0, 0.0);
  const auto s = laxflow::generate_state(m, {}, 14);
  const auto pr = laxflow::flow_residual_N1_N2(m, s, 1e-4);
  EXPECT_NEAR(pr.n1, pr.n2, 1e-12 + 1e-9 * pr.n1);
  // omega = 0: the first residual is that of dL/dt = [L, M].
  const double h = 1e-4;
  const auto r = laxflow::lax_flow_residual(m, s, h);
  const auto c = laxflow::build_lax(m, s);
  const auto up = laxflow::build_lax(m, laxflow::rk4_step(m, s, h));
  const auto down = laxflow::build_lax(m, laxflow::rk4_step(m, s, -h));
  const auto dl = (up.L - down.L) * cplx(1.0 / (2 * h));
  const double direct = laxflow::max_abs(dl - laxflow::commutator(c.L, c.M));
  EXPECT_NEAR(r.ltilde, direct, 1e-12 * std::max(1.0, direct));
}

TEST(Flow, RejectsNonPositiveStep) {
  const auto m = support::calogero(2, 1, 1);
  EXPECT_THROW(laxflow::lax_flow_residual(m, kPair, 0.0), laxflow::ConfigError);
}
