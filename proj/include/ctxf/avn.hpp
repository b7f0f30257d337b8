#pragma once

#include <optional>
#include <vector>

#include "ctxf/abgroup.hpp"
#include "ctxf/mermin.hpp"
#include "ctxf/sheaf.hpp"

namespace ctxf {

// sum_{m in context} n_m s_m = rhs, evaluated in a module G. Coefficients are
// residues mod q for a Z_q theory, or plain integers for a lifted theory.
struct LinearEquation {
  Domain context;
  std::vector<Integer> coeffs;
  GroupElement rhs;

  bool is_trivial() const;
};

struct LinearTheory {
  Integer modulus = 0;  // q; 0 means coefficients are integers
  FiniteAbelianGroup module;
  std::vector<LinearEquation> equations;
};

// s may be defined on a superset of the equation's context; values are element
// indices of g. DomainError if s misses part of the context.
bool satisfies(const FiniteAbelianGroup& g, const Section& s, const LinearEquation& phi);

// Every (n, b) with n in Z_q^C satisfied by all sections of w, coefficient
// vectors in enumeration order (first coefficient most significant). Section
// values are element indices of g. ModulusError unless exponent(g) divides q.
LinearTheory theory_of_support(const std::vector<Section>& w, Integer q, const FiniteAbelianGroup& g);

// Union over the cover of the theories of each context's support.
template <class S>
LinearTheory theory_of_model(const EmpiricalModel<S>& m, Integer q) {
  LinearTheory out{q, m.scenario().outcome_group(), {}};
  for (std::size_t c = 0; c < m.distributions().size(); ++c) {
    std::vector<Section> w;
    for (const auto& a : m.at(c).support()) w.push_back(Section{m.at(c).domain(), a});
    auto local = theory_of_support(w, q, m.scenario().outcome_group());
    for (auto& eq : local.equations) out.equations.push_back(std::move(eq));
  }
  return out;
}

// Lifts a Z_p theory (p prime, module Z_p) to integer coefficients acting on
// kprime. Each nontrivial equation is scaled so its first nonzero coefficient
// is 1, giving an integer equation phi_0 = b_0; the lift keeps t*phi_0 = t*b_0*1'
// for t = u + j*p (u the removed scaling, j below exponent(kprime)), where 1'
// is the all-ones element of kprime.
LinearTheory lift_theory(const LinearTheory& zp_theory, const FiniteAbelianGroup& kprime);

// First global assignment (enumeration order) over the scenario's measurements
// satisfying every equation of the theory, values in theory.module.
std::optional<Section> solve_theory(const MeasurementScenario& scenario, const LinearTheory& theory);

struct AvnResult {
  bool avn = false;
  std::optional<Section> witness;  // values in the module, when not AvN
  LinearTheory theory;
};

// AvN_{Z_q, g}. When g is the outcome group the theory is searched directly;
// otherwise the outcome group must be Z_q with q prime and the theory is lifted
// to g first.
AvnResult avn_check(const BooleanModel& m, Integer q, const FiniteAbelianGroup& g);

struct HierarchyWitness {
  Integer p = 0;
  FiniteAbelianGroup kprime;
  GroupElement y;
  Section assignment;  // values are element indices of kprime
  LinearTheory lifted;
};

// For the scenario of p*y = a over Z_p: the assignment 0 on controls and y on
// phased measurements, where p*y = a*1' in kprime, checked against the lifted
// theory of the model's support. PreconditionError if gcd(p, exponent(kprime))
// != 1 or kprime is trivial.
HierarchyWitness hierarchy_witness(const MerminScenario& s, const FiniteAbelianGroup& kprime);
// Builds the scenario for p*y = 1 over Z_p.
HierarchyWitness hierarchy_witness(Integer p, const FiniteAbelianGroup& kprime);

}  // namespace ctxf
