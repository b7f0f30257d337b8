#include "ctxf/mermin.hpp"

#include "ctxf/errors.hpp"

namespace ctxf {

namespace {

std::size_t ipow(Integer base, std::size_t exp) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) out *= static_cast<std::size_t>(base);
  return out;
}

// Calls fn on every tuple of K^n in enumeration order (first entry most significant).
template <class Fn>
void for_each_tuple(Integer d, std::size_t n, Fn&& fn) {
  Assignment a(n, 0);
  while (true) {
    fn(a);
    std::size_t pos = n;
    while (pos > 0) {
      --pos;
      if (++a[pos] < d) break;
      a[pos] = 0;
      if (pos == 0) return;
    }
    if (n == 0) return;
  }
}

Integer sum_indices(const FiniteAbelianGroup& k, const Assignment& a) {
  Integer acc = 0;
  for (Integer v : a) acc = k.add_index(acc, v);
  return acc;
}

// Uniform weight on the fiber {sum = target} of K^n.
Distribution<ProbabilitySemiring> fiber_distribution(const FiniteAbelianGroup& k, Domain domain,
                                                     const GroupElement& target) {
  const std::size_t n = domain.size();
  const Integer t = k.index_of(target);
  const mpq_class w(1, ipow(k.order(), n - 1));
  std::map<Assignment, mpq_class> weights;
  for_each_tuple(k.order(), n, [&](const Assignment& a) {
    if (sum_indices(k, a) == t) weights.emplace(a, w);
  });
  return Distribution<ProbabilitySemiring>(std::move(domain), weights);
}

}  // namespace

std::size_t MerminScenario::measurement_index(std::size_t party, std::size_t r) const {
  if (party >= parties || r > variables.size()) throw StructuralError("measurement out of range");
  return party * (variables.size() + 1) + r;
}

std::vector<TorusPoint> MerminScenario::context_alphas(std::size_t context) const {
  std::vector<TorusPoint> out;
  for (std::size_t r : context_phases.at(context)) out.push_back(beta[r]);
  return out;
}

MerminScenario build_scenario(const FiniteAbelianGroup& k, const ZModEquation& eqn,
                              const TorusAssignment& beta) {
  if (eqn.is_circle_valued()) throw UnsupportedValueGroupError("a Mermin scenario needs a K-valued equation");
  const EquationSystem single = EquationSystem::over_group({eqn}, k);
  if (auto relation = find_violated_relation(single)) {
    throw ConsistencyError("inconsistent equation " + eqn.to_string(k) + ": relation " +
                           format_relation(*relation));
  }
  if (!verify_solution(single, beta)) {
    throw PreconditionError("phase assignment does not solve " + eqn.to_string(k) + " in the torus");
  }
  if (eqn.terms().empty()) {
    throw DomainError("degenerate scenario: " + eqn.to_string(k) + " has no nonzero coefficient");
  }

  MerminScenario s{k, eqn, {}, {}, {}, {}, 1, 0, 0, {}, {}, {}, {}, {}, {}};
  s.target = std::get<GroupElement>(eqn.rhs());
  s.exponent = k.exponent();
  s.beta.push_back(TorusPoint::zero(k.order()));
  Integer total = 0;
  for (const auto& [name, n] : eqn.terms()) {
    s.variables.push_back(name);
    s.signs.push_back(n < 0 ? -1 : 1);
    s.coefficients.push_back(n < 0 ? -n : n);
    s.beta.push_back(n < 0 ? -beta.at(name) : beta.at(name));
    total += n < 0 ? -n : n;
  }

  // Least N >= max(2, sum n_r) with N = 1 mod k.
  Integer n_parties = std::max<Integer>(2, total);
  while (mod_floor(n_parties, s.exponent) != mod_floor(1, s.exponent)) ++n_parties;
  s.parties = static_cast<std::size_t>(n_parties);
  s.padding = n_parties - total;

  // R(i): least R >= 1 with i <= n_1 + ... + n_R, padding parties last.
  for (std::size_t i = 1; i <= s.parties; ++i) {
    std::size_t r = 0;
    Integer running = 0;
    for (std::size_t j = 0; j < s.coefficients.size(); ++j) {
      running += s.coefficients[j];
      if (static_cast<Integer>(i) <= running) {
        r = j + 1;
        break;
      }
    }
    s.phase_index.push_back(r);
    s.alphas.push_back(s.beta[r]);
  }

  const std::size_t m = s.variables.size();
  std::vector<std::string> labels;
  for (std::size_t i = 1; i <= s.parties; ++i) {
    for (std::size_t r = 0; r <= m; ++r) labels.push_back("X" + std::to_string(i) + "^" + std::to_string(r));
  }
  std::vector<Context> cover;
  s.context_phases.emplace_back(s.parties, 0);
  s.context_targets.push_back(k.zero());
  for (std::size_t v = 1; v <= s.parties; ++v) {
    std::vector<std::size_t> phases;
    for (std::size_t i = 1; i <= s.parties; ++i) phases.push_back(s.phase_index[(i + v - 2) % s.parties]);
    s.context_phases.push_back(std::move(phases));
    s.context_targets.push_back(s.target);
  }
  for (std::size_t c = 0; c < s.context_phases.size(); ++c) {
    Context ctx{c == 0 ? "control" : "var" + std::to_string(c), {}};
    for (std::size_t i = 0; i < s.parties; ++i) ctx.measurements.push_back(i * (m + 1) + s.context_phases[c][i]);
    cover.push_back(std::move(ctx));
  }
  s.measurement = MeasurementScenario(std::move(labels), k, std::move(cover));

  // Every context's phases must sum to the classical point it targets.
  for (std::size_t c = 0; c < s.context_phases.size(); ++c) {
    TorusPoint sum = TorusPoint::zero(k.order());
    for (const auto& a : s.context_alphas(c)) sum = sum + a;
    if (sum != k.classical_to_torus(s.context_targets[c])) {
      throw InvariantViolation("context " + s.measurement.cover()[c].name + " phases do not sum to its target");
    }
  }
  return s;
}

MerminScenario build_scenario(const FiniteAbelianGroup& k, const ZModEquation& eqn) {
  return build_scenario(k, eqn, solve_torus(EquationSystem::over_group({eqn}, k)));
}

ProbabilisticModel empirical_model(const MerminScenario& s) {
  std::vector<Distribution<ProbabilitySemiring>> per_context;
  for (std::size_t c = 0; c < s.measurement.cover().size(); ++c) {
    per_context.push_back(fiber_distribution(s.group, s.measurement.cover()[c].measurements,
                                             s.context_targets[c]));
  }
  return ProbabilisticModel(s.measurement, std::move(per_context));
}

GroupElement f_S_pushforward(const MerminScenario& s, const JointOutcome& jo) {
  const auto& k = s.group;
  if (jo.size() != s.context_phases.size()) throw StructuralError("one outcome per context is required");
  Integer variations = 0;
  Integer control = 0;
  for (std::size_t c = 0; c < jo.size(); ++c) {
    if (jo[c].size() != s.parties) throw StructuralError("outcome length differs from party count");
    for (Integer v : jo[c]) {
      if (v < 0 || v >= k.order()) throw StructuralError("outcome index out of range");
    }
    const Integer sum = sum_indices(k, jo[c]);
    if (sum != k.index_of(s.context_targets[c])) {
      throw DomainError("outcome of context " + s.measurement.cover()[c].name + " lies outside its support");
    }
    if (c == 0) {
      control = sum;
    } else {
      variations = k.add_index(variations, sum);
    }
  }
  const Integer pushed = k.add_index(variations, k.scalar_mul_index(-s.padding, control));
  return k.element(pushed);
}

Distribution<ProbabilitySemiring> lhv_when_solvable(const MerminScenario& s, const GroupAssignment& b) {
  const auto& k = s.group;
  GroupElement lhs = k.zero();
  for (const auto& [name, n] : s.equation.terms()) {
    auto it = b.find(name);
    if (it == b.end() || !k.contains(it->second)) throw PreconditionError("assignment misses variable " + name);
    lhs = k.add(lhs, k.scalar_mul(n, it->second));
  }
  if (lhs != s.target) throw PreconditionError("assignment does not solve " + s.equation.to_string(k));

  std::vector<Integer> shift{0};  // b_0 = 0, then sign-adjusted b_r
  for (std::size_t r = 0; r < s.variables.size(); ++r) {
    const GroupElement& v = b.at(s.variables[r]);
    shift.push_back(k.index_of(s.signs[r] < 0 ? k.negate(v) : v));
  }
  const std::size_t m = s.variables.size();
  const mpq_class w(1, ipow(k.order(), s.parties - 1));
  std::map<Assignment, mpq_class> weights;
  for_each_tuple(k.order(), s.parties, [&](const Assignment& x) {
    if (sum_indices(k, x) != 0) return;
    Assignment global(s.parties * (m + 1));
    for (std::size_t i = 0; i < s.parties; ++i) {
      for (std::size_t r = 0; r <= m; ++r) global[i * (m + 1) + r] = k.add_index(x[i], shift[r]);
    }
    weights.emplace(std::move(global), w);
  });
  return Distribution<ProbabilitySemiring>(s.measurement.all_measurements(), weights);
}

// ----------------------------------------------------------------- composites

CompositeScenario tensor_scenarios(std::vector<MerminScenario> factors) {
  if (factors.empty()) throw StructuralError("tensor of an empty list of scenarios");
  CompositeScenario cs;
  cs.group = factors.front().group;
  std::vector<std::string> labels;
  for (std::size_t f = 0; f < factors.size(); ++f) {
    if (!(factors[f].group == cs.group)) throw StructuralError("scenarios over different groups");
    cs.offsets.push_back(labels.size());
    for (const auto& m : factors[f].measurement.measurements()) {
      labels.push_back("S" + std::to_string(f + 1) + ":" + m);
    }
  }
  std::vector<std::size_t> choice(factors.size(), 0);
  std::vector<Context> cover;
  while (true) {
    Context ctx;
    for (std::size_t f = 0; f < factors.size(); ++f) {
      const auto& fc = factors[f].measurement.cover()[choice[f]];
      ctx.name += (f ? "|" : "") + fc.name;
      for (auto i : fc.measurements) ctx.measurements.push_back(cs.offsets[f] + i);
    }
    cs.context_factors.push_back(choice);
    cover.push_back(std::move(ctx));
    std::size_t pos = factors.size();
    bool done = true;
    while (pos > 0) {
      --pos;
      if (++choice[pos] < factors[pos].measurement.cover().size()) {
        done = false;
        break;
      }
      choice[pos] = 0;
    }
    if (done) break;
  }
  cs.measurement = MeasurementScenario(std::move(labels), cs.group, std::move(cover));
  cs.factors = std::move(factors);
  return cs;
}

CompositeScenario build_system_scenario(const EquationSystem& sys) {
  if (sys.is_circle_valued()) throw UnsupportedValueGroupError("a Mermin scenario needs a K-valued system");
  if (sys.equations().empty()) throw StructuralError("empty system");
  const TorusAssignment beta = solve_torus(sys);
  std::vector<MerminScenario> factors;
  for (const auto& eq : sys.equations()) {
    TorusAssignment local;
    for (const auto& v : eq.variables()) local[v] = beta.at(v);
    factors.push_back(build_scenario(*sys.group(), eq, local));
  }
  return tensor_scenarios(std::move(factors));
}

ProbabilisticModel composite_empirical_model(const CompositeScenario& cs) {
  std::vector<ProbabilisticModel> models;
  for (const auto& f : cs.factors) models.push_back(empirical_model(f));
  std::vector<Distribution<ProbabilitySemiring>> per_context;
  for (std::size_t c = 0; c < cs.context_factors.size(); ++c) {
    std::map<Assignment, mpq_class> weights{{Assignment{}, mpq_class(1)}};
    for (std::size_t f = 0; f < cs.factors.size(); ++f) {
      std::map<Assignment, mpq_class> next;
      for (const auto& [prefix, w] : weights) {
        for (const auto& [a, v] : models[f].at(cs.context_factors[c][f]).weights()) {
          Assignment joined = prefix;
          joined.insert(joined.end(), a.begin(), a.end());
          next.emplace(std::move(joined), w * v);
        }
      }
      weights = std::move(next);
    }
    per_context.emplace_back(cs.measurement.cover()[c].measurements, weights);
  }
  return ProbabilisticModel(cs.measurement, std::move(per_context));
}

Distribution<ProbabilitySemiring> composite_lhv(const CompositeScenario& cs,
                                                const std::vector<GroupAssignment>& solutions) {
  if (solutions.size() != cs.factors.size()) throw StructuralError("one solution per factor is required");
  std::map<Assignment, mpq_class> weights{{Assignment{}, mpq_class(1)}};
  for (std::size_t f = 0; f < cs.factors.size(); ++f) {
    auto local = lhv_when_solvable(cs.factors[f], solutions[f]);
    std::map<Assignment, mpq_class> next;
    for (const auto& [prefix, w] : weights) {
      for (const auto& [a, v] : local.weights()) {
        Assignment joined = prefix;
        joined.insert(joined.end(), a.begin(), a.end());
        next.emplace(std::move(joined), w * v);
      }
    }
    weights = std::move(next);
  }
  return Distribution<ProbabilitySemiring>(cs.measurement.all_measurements(), weights);
}

}  // namespace ctxf
