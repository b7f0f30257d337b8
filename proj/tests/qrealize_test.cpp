#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ctxf/errors.hpp"
#include "ctxf/qrealize.hpp"

using namespace ctxf;

namespace {

TorusPoint turn1(Integer p, Integer q) { return TorusPoint({RationalTurn(p, q)}); }

// Phase gate straight from its definition: (1/D) sum_y exp(2 pi i (alpha_y - <y, x' - x>)).
ComplexMatrix reference_gate(const FiniteAbelianGroup& g, const TorusPoint& alpha) {
  const Integer d = g.order();
  ComplexMatrix m(d, d);
  for (Integer xp = 0; xp < d; ++xp) {
    for (Integer x = 0; x < d; ++x) {
      std::complex<double> acc = 0;
      const auto diff = g.subtract(g.element(xp), g.element(x));
      for (Integer y = 0; y < d; ++y) {
        const double t = (alpha.at(y) - g.pairing(g.element(y), diff)).to_double();
        acc += std::polar(1.0, 2 * std::numbers::pi * t);
      }
      m(xp, x) = acc / static_cast<double>(d);
    }
  }
  return m;
}

TorusPoint random_phase(const FiniteAbelianGroup& g, std::mt19937& rng) {
  std::uniform_int_distribution<Integer> num(0, 23);
  std::vector<RationalTurn> c;
  for (Integer y = 1; y < g.order(); ++y) c.emplace_back(num(rng), 24);
  return TorusPoint(c);
}

}  // namespace

TEST(QRealize, CharacterMatrixIsScaledUnitary) {
  for (auto lit : {"Z2", "Z3", "Z2xZ2", "Z4", "Z2xZ3"}) {
    auto g = FiniteAbelianGroup::parse(lit);
    auto f = character_matrix(g);
    ComplexMatrix id = f * f.adjoint() / static_cast<double>(g.order());
    EXPECT_LT((id - ComplexMatrix::Identity(g.order(), g.order())).norm(), 1e-12) << lit;
  }
}

TEST(QRealize, GhzStateSupport) {
  auto z3 = FiniteAbelianGroup::cyclic(3);
  auto s = ghz_state(z3, 3, GroupElement({1}));
  ASSERT_EQ(s.amplitudes.size(), 27);
  int ones = 0;
  for (Integer idx = 0; idx < 27; ++idx) {
    const Integer sum = idx / 9 + (idx / 3) % 3 + idx % 3;
    const bool in_fiber = sum % 3 == 1;
    EXPECT_EQ(s.amplitudes[idx], std::complex<double>(in_fiber ? 1.0 : 0.0, 0.0));
    ones += in_fiber;
  }
  EXPECT_EQ(ones, 9);
}

TEST(QRealize, PhaseGateMatchesDefinitionAndIsUnitary) {
  std::mt19937 rng(7);
  for (auto lit : {"Z2", "Z3", "Z4", "Z2xZ2", "Z6"}) {
    auto g = FiniteAbelianGroup::parse(lit);
    for (int trial = 0; trial < 5; ++trial) {
      auto alpha = random_phase(g, rng);
      auto u = phase_gate(g, alpha);
      EXPECT_LT((u - reference_gate(g, alpha)).norm(), 1e-12);
      EXPECT_LT((u * u.adjoint() - ComplexMatrix::Identity(g.order(), g.order())).norm(), 1e-12);
    }
  }
}

TEST(QRealize, ClassicalPhaseGateIsTranslation) {
  // The gate of a classical point x acts on X-basis states as a shift by x.
  auto g = FiniteAbelianGroup::parse("Z2xZ2");
  for (const auto& x : g.elements()) {
    auto u = phase_gate(g, g.classical_to_torus(x));
    for (Integer src = 0; src < g.order(); ++src) {
      const Integer dst = g.index_of(g.add(g.element(src), x));
      for (Integer row = 0; row < g.order(); ++row) {
        EXPECT_NEAR(std::abs(u(row, src)), row == dst ? 1.0 : 0.0, 1e-12);
      }
    }
  }
}

TEST(QRealize, MeasureRejectsZeroVector) {
  StateVector zero{2, 1, Eigen::VectorXcd::Zero(2)};
  EXPECT_THROW(measure_all_X(zero), DomainError);
}

TEST(QRealize, QubitMerminContextsHold) {
  auto z2 = FiniteAbelianGroup::cyclic(2);
  const std::vector<std::vector<TorusPoint>> contexts{
      {turn1(0, 1), turn1(0, 1), turn1(0, 1)},
      {turn1(1, 4), turn1(1, 4), turn1(0, 1)},
      {turn1(0, 1), turn1(1, 4), turn1(1, 4)},
      {turn1(1, 4), turn1(0, 1), turn1(1, 4)},
  };
  for (std::size_t c = 0; c < contexts.size(); ++c) {
    auto parity = check_parity_lemma(z2, 3, contexts[c]);
    auto deco = check_decoherence_lemma(z2, 3, contexts[c]);
    EXPECT_TRUE(parity.holds()) << parity.message;
    EXPECT_TRUE(deco.holds()) << deco.message;
    ASSERT_TRUE(parity.target.has_value());
    EXPECT_EQ(*parity.target, GroupElement({c == 0 ? 0 : 1}));
    auto dist = measure_all_X(gated_ghz(z2, contexts[c]));
    EXPECT_LT(max_deviation(dist, fiber_prediction(z2, 3, *parity.target)), kRealizeTolerance);
  }
}

TEST(QRealize, NonClassicalPhaseSumIsUnrealizable) {
  auto z2 = FiniteAbelianGroup::cyclic(2);
  std::vector<TorusPoint> alphas{turn1(1, 4), turn1(0, 1), turn1(0, 1)};
  EXPECT_EQ(check_parity_lemma(z2, 3, alphas).status, LemmaCheck::Status::Unrealizable);
  EXPECT_EQ(check_decoherence_lemma(z2, 3, alphas).status, LemmaCheck::Status::Unrealizable);
  EXPECT_EQ(to_string(LemmaCheck::Status::Unrealizable), "unrealizable");
}

TEST(QRealizeProperty, GatedGhzEqualsShiftedGhz) {
  // With classical phase sum a, the gated GHZ state equals GHZ_a exactly.
  std::mt19937 rng(11);
  for (auto lit : {"Z2", "Z3", "Z4", "Z2xZ2"}) {
    auto g = FiniteAbelianGroup::parse(lit);
    for (std::size_t n = 2; n <= 3; ++n) {
      for (int trial = 0; trial < 4; ++trial) {
        std::vector<TorusPoint> alphas;
        TorusPoint sum = TorusPoint::zero(g.order());
        for (std::size_t i = 0; i + 1 < n; ++i) {
          alphas.push_back(random_phase(g, rng));
          sum = sum + alphas.back();
        }
        const auto a = g.element(std::uniform_int_distribution<Integer>(0, g.order() - 1)(rng));
        alphas.push_back(g.classical_to_torus(a) - sum);
        auto gated = gated_ghz(g, alphas);
        auto plain = ghz_state(g, n, a);
        EXPECT_LT((gated.amplitudes - plain.amplitudes).norm(), 1e-9) << lit << " n=" << n;
        EXPECT_TRUE(check_decoherence_lemma(g, n, alphas).holds());
      }
    }
  }
}

TEST(QRealizeProperty, ZBasisScalesNormBySqrtDPerSite) {
  // The character matrix is unnormalized, so each site contributes sqrt(D).
  auto g = FiniteAbelianGroup::cyclic(3);
  auto s = ghz_state(g, 3, GroupElement({2}));
  auto z = to_z_basis(g, s);
  EXPECT_NEAR(z.amplitudes.norm(), s.amplitudes.norm() * std::pow(3.0, 1.5), 1e-9);
}
