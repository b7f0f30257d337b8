#include <gtest/gtest.h>

#include <random>

#include "ctxf/avn.hpp"
#include "ctxf/errors.hpp"
#include "ctxf/mermin.hpp"
#include "ctxf/parse.hpp"

using namespace ctxf;

namespace {

MerminScenario scenario(const std::string& group, const std::string& eqn) {
  auto g = FiniteAbelianGroup::parse(group);
  return build_scenario(g, parse_equation(eqn, g));
}

std::vector<Section> sections_of(const Domain& d, const std::vector<Assignment>& values) {
  std::vector<Section> out;
  for (const auto& v : values) out.push_back(Section{d, v});
  return out;
}

// Z_q-linear form on Z_q-valued sections computed with plain integers.
Integer form(const std::vector<Integer>& n, const Assignment& s, Integer q) {
  Integer acc = 0;
  for (std::size_t k = 0; k < n.size(); ++k) acc += n[k] * s[k];
  return mod_floor(acc, q);
}

bool has_equation(const LinearTheory& t, const std::vector<Integer>& coeffs, Integer rhs) {
  for (const auto& phi : t.equations) {
    if (phi.coeffs == coeffs && phi.rhs == GroupElement({rhs})) return true;
  }
  return false;
}

}  // namespace

TEST(Avn, SatisfiesExamples) {
  auto z2 = FiniteAbelianGroup::cyclic(2);
  LinearEquation parity{{0, 1, 2}, {1, 1, 1}, GroupElement({0})};
  EXPECT_TRUE(satisfies(z2, Section{{0, 1, 2}, {1, 1, 0}}, parity));
  EXPECT_FALSE(satisfies(z2, Section{{0, 1, 2}, {1, 0, 0}}, parity));
  LinearEquation trivial{{0, 1, 2}, {0, 0, 0}, GroupElement({0})};
  EXPECT_TRUE(trivial.is_trivial());
  EXPECT_TRUE(satisfies(z2, Section{{0, 1, 2}, {1, 0, 1}}, trivial));
  EXPECT_THROW(satisfies(z2, Section{{0, 1}, {1, 0}}, parity), DomainError);
}

TEST(Avn, ControlSupportTheory) {
  auto z2 = FiniteAbelianGroup::cyclic(2);
  auto w = sections_of({0, 2, 4}, {{0, 0, 0}, {0, 1, 1}, {1, 0, 1}, {1, 1, 0}});
  auto t = theory_of_support(w, 2, z2);
  EXPECT_TRUE(has_equation(t, {1, 1, 1}, 0));
  EXPECT_TRUE(has_equation(t, {0, 0, 0}, 0));
  EXPECT_FALSE(has_equation(t, {1, 0, 0}, 0));
  EXPECT_FALSE(has_equation(t, {1, 0, 0}, 1));
  EXPECT_EQ(t.equations.size(), 2u);
}

TEST(Avn, ModulusMustMatchExponent) {
  auto z2 = FiniteAbelianGroup::cyclic(2);
  auto w = sections_of({0}, {{0}});
  EXPECT_THROW(theory_of_support(w, 3, z2), ModulusError);
  EXPECT_NO_THROW(theory_of_support(w, 4, z2));
}

TEST(Avn, MerminTheorySizes) {
  auto z2 = empirical_model(scenario("Z2", "2*y = (1)"));
  auto z3 = empirical_model(scenario("Z3", "3*y = (1)"));
  // Only the constant multiples of the all-ones vector survive on a fiber.
  EXPECT_EQ(theory_of_model(possibilize(z2), 2).equations.size(), 8u);
  EXPECT_EQ(theory_of_model(possibilize(z3), 3).equations.size(), 15u);
}

TEST(Avn, Verdicts) {
  auto z2 = FiniteAbelianGroup::cyclic(2);
  auto z3 = FiniteAbelianGroup::cyclic(3);
  EXPECT_TRUE(avn_check(possibilize(empirical_model(scenario("Z2", "2*y = (1)"))), 2, z2).avn);
  EXPECT_TRUE(avn_check(possibilize(empirical_model(scenario("Z3", "3*y = (1)"))), 3, z3).avn);
  auto solvable = avn_check(possibilize(empirical_model(scenario("Z2", "2*y = (0)"))), 2, z2);
  EXPECT_FALSE(solvable.avn);
  ASSERT_TRUE(solvable.witness.has_value());
  for (const auto& phi : solvable.theory.equations) EXPECT_TRUE(satisfies(z2, *solvable.witness, phi));
}

TEST(Avn, OtherModuleNeedsPrimeCyclicOutcomes) {
  auto m = possibilize(empirical_model(scenario("Z4", "2*y = (1)")));
  EXPECT_THROW(avn_check(m, 4, FiniteAbelianGroup::cyclic(2)), UnsupportedValueGroupError);
}

TEST(Avn, LiftedTheoryOverOtherModule) {
  auto m = possibilize(empirical_model(scenario("Z3", "3*y = (1)")));
  auto r = avn_check(m, 3, FiniteAbelianGroup::cyclic(2));
  EXPECT_FALSE(r.avn);
  EXPECT_EQ(r.theory.modulus, 0);
  // 5 contexts, two nontrivial Z3 equations each, two lifts per equation.
  EXPECT_EQ(r.theory.equations.size(), 20u);
}

TEST(Avn, HierarchyWitnessP3) {
  auto w = hierarchy_witness(3, FiniteAbelianGroup::cyclic(2));
  EXPECT_EQ(w.y, GroupElement({1}));
  auto s = scenario("Z3", "3*y = (1)");
  for (std::size_t i = 0; i < s.parties; ++i) {
    EXPECT_EQ(w.assignment.values[s.measurement_index(i, 0)], 0);
    EXPECT_EQ(w.assignment.values[s.measurement_index(i, 1)], 1);
  }
  // Independent recheck of every lifted equation in Z2.
  for (const auto& phi : w.lifted.equations) {
    Integer acc = 0;
    for (std::size_t k = 0; k < phi.context.size(); ++k) acc += phi.coeffs[k] * w.assignment.values[phi.context[k]];
    EXPECT_EQ(mod_floor(acc, 2), phi.rhs.residues()[0]);
  }
}

TEST(Avn, HierarchyWitnessP5) {
  auto w = hierarchy_witness(5, FiniteAbelianGroup::cyclic(3));
  EXPECT_EQ(w.y, GroupElement({2}));
  for (const auto& phi : w.lifted.equations) {
    Integer acc = 0;
    for (std::size_t k = 0; k < phi.context.size(); ++k) acc += phi.coeffs[k] * w.assignment.values[phi.context[k]];
    EXPECT_EQ(mod_floor(acc, 3), phi.rhs.residues()[0]);
  }
}

TEST(Avn, HierarchyWitnessPreconditions) {
  EXPECT_THROW(hierarchy_witness(3, FiniteAbelianGroup::cyclic(3)), PreconditionError);
  EXPECT_THROW(hierarchy_witness(4, FiniteAbelianGroup::cyclic(3)), PreconditionError);
  EXPECT_THROW(hierarchy_witness(3, FiniteAbelianGroup()), PreconditionError);
  EXPECT_THROW(hierarchy_witness(3, FiniteAbelianGroup::cyclic(6)), PreconditionError);
}

TEST(AvnProperty, TheoryIsExactlyTheSatisfiedEquations) {
  // Brute force over every (n, b): emitted iff every section satisfies it.
  std::mt19937 rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    const Integer q = 2 + trial % 2;
    const std::size_t width = 1 + trial % 4;
    const auto g = FiniteAbelianGroup::cyclic(q);
    Domain d(width);
    for (std::size_t k = 0; k < width; ++k) d[k] = k;
    std::set<Assignment> chosen;
    const int count = std::uniform_int_distribution<int>(1, 5)(rng);
    for (int i = 0; i < count; ++i) {
      Assignment a(width);
      for (auto& v : a) v = std::uniform_int_distribution<Integer>(0, q - 1)(rng);
      chosen.insert(a);
    }
    auto w = sections_of(d, std::vector<Assignment>(chosen.begin(), chosen.end()));
    auto t = theory_of_support(w, q, g);
    for (const auto& phi : t.equations) {
      for (const auto& s : w) EXPECT_TRUE(satisfies(g, s, phi));
    }
    Integer total = 1;
    for (std::size_t k = 0; k < width; ++k) total *= q;
    std::size_t expected = 0;
    for (Integer code = 0; code < total; ++code) {
      std::vector<Integer> n(width);
      Integer c = code;
      for (std::size_t k = width; k-- > 0;) { n[k] = c % q; c /= q; }
      for (Integer b = 0; b < q; ++b) {
        bool all = true;
        for (const auto& s : w) all = all && form(n, s.values, q) == b;
        EXPECT_EQ(has_equation(t, n, b), all);
        expected += all;
      }
    }
    EXPECT_EQ(t.equations.size(), expected);
  }
}

TEST(AvnProperty, ProportionalEquationsHaveProportionalRhs) {
  // Every nonempty support over two Z3 measurements.
  const auto z3 = FiniteAbelianGroup::cyclic(3);
  const Domain d{0, 1};
  for (int mask = 1; mask < 512; ++mask) {
    std::vector<Assignment> values;
    for (int k = 0; k < 9; ++k) {
      if (mask >> k & 1) values.push_back({k / 3, k % 3});
    }
    auto t = theory_of_support(sections_of(d, values), 3, z3);
    for (const auto& a : t.equations) {
      if (a.is_trivial()) continue;
      for (const auto& b : t.equations) {
        for (Integer c = 1; c < 3; ++c) {
          if (b.coeffs == std::vector<Integer>{a.coeffs[0] * c % 3, a.coeffs[1] * c % 3}) {
            EXPECT_EQ(b.rhs.residues()[0], a.rhs.residues()[0] * c % 3);
          }
        }
      }
    }
  }
}

TEST(AvnProperty, AvnImpliesStrongContextuality) {
  for (auto [g, e] : std::vector<std::pair<std::string, std::string>>{
           {"Z2", "2*y = (1)"}, {"Z2", "2*y = (0)"}, {"Z3", "3*y = (1)"}, {"Z3", "2*y = (1)"},
           {"Z2", "a + b = (1)"}, {"Z4", "2*y = (1)"}}) {
    auto m = empirical_model(scenario(g, e));
    const auto k = m.scenario().outcome_group();
    auto r = avn_check(possibilize(m), k.exponent(), k);
    if (r.avn) EXPECT_EQ(classify(m), ContextualityLevel::StronglyContextual) << g << " " << e;
  }
}
