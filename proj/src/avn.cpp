#include "ctxf/avn.hpp"

#include <functional>

#include "ctxf/errors.hpp"

namespace ctxf {

namespace {

bool is_prime(Integer n) {
  if (n < 2) return false;
  for (Integer d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

Integer inverse_mod(Integer a, Integer m) {
  a = mod_floor(a, m);
  for (Integer x = 1; x < m; ++x) {
    if (a * x % m == 1) return x;
  }
  if (m == 1) return 0;
  throw PreconditionError(std::to_string(a) + " is not invertible mod " + std::to_string(m));
}

GroupElement all_ones(const FiniteAbelianGroup& g) {
  return g.make(std::vector<Integer>(g.rank(), 1));
}

// Left-hand side of phi on values indexed like phi.context.
Integer evaluate(const FiniteAbelianGroup& g, const LinearEquation& phi, const Assignment& values) {
  Integer acc = 0;
  for (std::size_t k = 0; k < phi.coeffs.size(); ++k) {
    if (phi.coeffs[k] != 0) acc = g.add_index(acc, g.scalar_mul_index(phi.coeffs[k], values[k]));
  }
  return acc;
}

}  // namespace

bool LinearEquation::is_trivial() const {
  for (Integer c : coeffs) {
    if (c != 0) return false;
  }
  return true;
}

bool satisfies(const FiniteAbelianGroup& g, const Section& s, const LinearEquation& phi) {
  if (phi.coeffs.size() != phi.context.size()) throw StructuralError("coefficients do not match the context");
  const Section local = restrict_section(s, phi.context);
  return evaluate(g, phi, local.values) == g.index_of(phi.rhs);
}

LinearTheory theory_of_support(const std::vector<Section>& w, Integer q, const FiniteAbelianGroup& g) {
  if (q < 1 || q % g.exponent() != 0) {
    throw ModulusError("Z_" + std::to_string(q) + " does not act on " + g.to_string() +
                       " (exponent " + std::to_string(g.exponent()) + ")");
  }
  if (w.empty()) throw PreconditionError("theory of an empty support");
  const Domain& context = w.front().domain;
  for (const auto& s : w) {
    if (s.domain != context) throw DomainError("support sections over different domains");
  }
  LinearTheory out{q, g, {}};
  LinearEquation phi{context, std::vector<Integer>(context.size(), 0), g.zero()};
  while (true) {
    // The first section fixes b; the rest must agree.
    const Integer b = evaluate(g, phi, w.front().values);
    bool ok = true;
    for (std::size_t i = 1; i < w.size() && ok; ++i) ok = evaluate(g, phi, w[i].values) == b;
    if (ok) {
      phi.rhs = g.element(b);
      out.equations.push_back(phi);
    }
    std::size_t pos = context.size();
    bool done = true;
    while (pos > 0) {
      --pos;
      if (++phi.coeffs[pos] < q) {
        done = false;
        break;
      }
      phi.coeffs[pos] = 0;
    }
    if (done) break;
  }
  return out;
}

LinearTheory lift_theory(const LinearTheory& zp_theory, const FiniteAbelianGroup& kprime) {
  const Integer p = zp_theory.modulus;
  if (!is_prime(p) || !(zp_theory.module == FiniteAbelianGroup::cyclic(p))) {
    throw ModulusError("lifting needs a theory over Z_p with p prime acting on Z_p");
  }
  const GroupElement one = all_ones(kprime);
  const Integer e = kprime.exponent();
  LinearTheory out{0, kprime, {}};
  for (const auto& phi : zp_theory.equations) {
    if (phi.is_trivial()) continue;
    Integer u = 0;
    for (Integer c : phi.coeffs) {
      if (c != 0) {
        u = c;
        break;
      }
    }
    const Integer u_inv = inverse_mod(u, p);
    std::vector<Integer> base;
    for (Integer c : phi.coeffs) base.push_back(c * u_inv % p);
    const Integer b0 = phi.rhs.residues()[0] * u_inv % p;
    for (Integer j = 0; j < e; ++j) {
      const Integer t = u + j * p;
      LinearEquation lifted{phi.context, {}, kprime.scalar_mul(t * b0, one)};
      for (Integer c : base) lifted.coeffs.push_back(t * c);
      out.equations.push_back(std::move(lifted));
    }
  }
  return out;
}

std::optional<Section> solve_theory(const MeasurementScenario& scenario, const LinearTheory& theory) {
  const FiniteAbelianGroup& g = theory.module;
  const std::size_t n = scenario.measurements().size();
  // Each equation is checked once the last measurement of its context is set.
  std::vector<std::vector<const LinearEquation*>> due(n);
  for (const auto& phi : theory.equations) {
    if (phi.context.empty()) {
      if (!(phi.rhs == g.zero())) return std::nullopt;
      continue;
    }
    if (phi.context.back() >= n) throw DomainError("equation names an unknown measurement");
    due[phi.context.back()].push_back(&phi);
  }
  Assignment values(n, 0);
  Assignment local;
  auto holds = [&](const LinearEquation& phi) {
    local.resize(phi.context.size());
    for (std::size_t k = 0; k < phi.context.size(); ++k) local[k] = values[phi.context[k]];
    return evaluate(g, phi, local) == g.index_of(phi.rhs);
  };
  std::function<bool(std::size_t)> descend = [&](std::size_t pos) {
    if (pos == n) return true;
    for (Integer v = 0; v < g.order(); ++v) {
      values[pos] = v;
      bool ok = true;
      for (const auto* phi : due[pos]) {
        if (!holds(*phi)) {
          ok = false;
          break;
        }
      }
      if (ok && descend(pos + 1)) return true;
    }
    return false;
  };
  if (!descend(0)) return std::nullopt;
  return Section{scenario.all_measurements(), values};
}

AvnResult avn_check(const BooleanModel& m, Integer q, const FiniteAbelianGroup& g) {
  for (const auto& d : m.distributions()) {
    if (d.weights().empty()) throw PreconditionError("a context has empty support");
  }
  AvnResult out;
  const FiniteAbelianGroup& k = m.scenario().outcome_group();
  if (g == k) {
    out.theory = theory_of_model(m, q);
  } else {
    if (!is_prime(q) || !(k == FiniteAbelianGroup::cyclic(q))) {
      throw UnsupportedValueGroupError("AvN over a module other than the outcome group " + k.to_string() +
                                       " needs outcome group Z_q with q prime");
    }
    out.theory = lift_theory(theory_of_model(m, q), g);
  }
  out.witness = solve_theory(m.scenario(), out.theory);
  out.avn = !out.witness.has_value();
  return out;
}

HierarchyWitness hierarchy_witness(const MerminScenario& s, const FiniteAbelianGroup& kprime) {
  const Integer p = s.group.order();
  if (!is_prime(p) || !(s.group == FiniteAbelianGroup::cyclic(p))) {
    throw PreconditionError("hierarchy witness needs a scenario over Z_p with p prime");
  }
  if (kprime.is_trivial()) throw PreconditionError("the target module must be nontrivial");
  const Integer e = kprime.exponent();
  if (gcd(p, e) != 1) {
    throw PreconditionError("p = " + std::to_string(p) + " is not coprime to the exponent " +
                            std::to_string(e) + " of " + kprime.to_string());
  }
  if (s.coefficients.size() != 1 || s.coefficients[0] != p) {
    throw PreconditionError("hierarchy witness needs an equation of the form p*y = a");
  }
  const Integer a = s.target.residues()[0];
  // p*y = a*1' with 1' the all-ones element.
  HierarchyWitness out;
  out.p = p;
  out.kprime = kprime;
  out.y = kprime.scalar_mul(inverse_mod(p, e) * a, all_ones(kprime));
  const Integer y_index = kprime.index_of(out.y);
  const std::size_t n = s.measurement.measurements().size();
  out.assignment = Section{s.measurement.all_measurements(), Assignment(n, 0)};
  for (std::size_t i = 0; i < s.parties; ++i) out.assignment.values[s.measurement_index(i, 1)] = y_index;

  out.lifted = lift_theory(theory_of_model(empirical_model(s), p), kprime);
  for (const auto& phi : out.lifted.equations) {
    if (!satisfies(kprime, out.assignment, phi)) {
      throw InvariantViolation("hierarchy witness violates a lifted equation");
    }
  }
  return out;
}

HierarchyWitness hierarchy_witness(Integer p, const FiniteAbelianGroup& kprime) {
  if (!is_prime(p)) throw PreconditionError(std::to_string(p) + " is not prime");
  if (kprime.is_trivial()) throw PreconditionError("the target module must be nontrivial");
  if (gcd(p, kprime.exponent()) != 1) {
    throw PreconditionError("p = " + std::to_string(p) + " is not coprime to the exponent " +
                            std::to_string(kprime.exponent()) + " of " + kprime.to_string());
  }
  const auto zp = FiniteAbelianGroup::cyclic(p);
  return hierarchy_witness(build_scenario(zp, ZModEquation({{"y", p}}, zp.make({1}))), kprime);
}

}  // namespace ctxf
