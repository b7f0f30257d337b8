#pragma once

#include <gmpxx.h>

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ctxf/abgroup.hpp"
#include "ctxf/errors.hpp"

namespace ctxf {

// ------------------------------------------------------------------ semirings

struct BooleanSemiring {
  using value_type = bool;
  static constexpr const char* name = "boolean";
  static bool zero() { return false; }
  static bool one() { return true; }
  static bool add(bool a, bool b) { return a || b; }
  static bool is_zero(bool v) { return !v; }
  static bool valid(bool) { return true; }
  static std::string format(bool v) { return v ? "1" : "0"; }
};

struct ProbabilitySemiring {
  using value_type = mpq_class;
  static constexpr const char* name = "probability";
  static mpq_class zero() { return 0; }
  static mpq_class one() { return 1; }
  static mpq_class add(const mpq_class& a, const mpq_class& b) { return a + b; }
  static bool is_zero(const mpq_class& v) { return sgn(v) == 0; }
  static bool valid(const mpq_class& v) { return sgn(v) >= 0; }
  static std::string format(const mpq_class& v) { return v.get_str(); }
};

struct SignedSemiring {
  using value_type = mpq_class;
  static constexpr const char* name = "signed";
  static mpq_class zero() { return 0; }
  static mpq_class one() { return 1; }
  static mpq_class add(const mpq_class& a, const mpq_class& b) { return a + b; }
  static bool is_zero(const mpq_class& v) { return sgn(v) == 0; }
  static bool valid(const mpq_class&) { return true; }
  static std::string format(const mpq_class& v) { return v.get_str(); }
};

// ------------------------------------------------------------------ scenarios

// Sorted, duplicate-free measurement indices.
using Domain = std::vector<std::size_t>;

// Outcome element indices aligned with a Domain.
using Assignment = std::vector<Integer>;

struct Context {
  std::string name;
  Domain measurements;
};

// Measurements with a shared outcome group and a cover of contexts whose
// union is the whole measurement set.
class MeasurementScenario {
 public:
  MeasurementScenario() = default;
  MeasurementScenario(std::vector<std::string> measurements, FiniteAbelianGroup outcomes,
                      std::vector<Context> cover);

  const std::vector<std::string>& measurements() const { return measurements_; }
  const FiniteAbelianGroup& outcome_group() const { return outcomes_; }
  const std::vector<Context>& cover() const { return cover_; }
  std::size_t measurement_index(const std::string& label) const;
  std::size_t context_index(const std::string& name) const;
  Domain all_measurements() const;

 private:
  std::vector<std::string> measurements_;
  FiniteAbelianGroup outcomes_;
  std::vector<Context> cover_;
};

struct Section {
  Domain domain;
  Assignment values;

  auto operator<=>(const Section&) const = default;
  bool operator==(const Section&) const = default;
};

Domain domain_intersection(const Domain& a, const Domain& b);
bool domain_subset(const Domain& v, const Domain& u);
// Positions of V's measurements inside U; DomainError if V is not a subset.
std::vector<std::size_t> embedding(const Domain& v, const Domain& u);
Section restrict_section(const Section& s, const Domain& v);
std::string format_section(const MeasurementScenario& scenario, const Section& s);

// --------------------------------------------------------------- distributions

template <class S>
class Distribution {
 public:
  using value_type = typename S::value_type;

  Distribution() = default;
  // Zero weights are dropped. Validates semiring membership and normalization.
  Distribution(Domain domain, const std::map<Assignment, value_type>& weights)
      : domain_(std::move(domain)) {
    value_type total = S::zero();
    for (const auto& [a, w] : weights) {
      if (a.size() != domain_.size()) throw StructuralError("assignment does not match domain");
      if (!S::valid(w)) throw DomainError(std::string("weight outside the ") + S::name + " semiring");
      if (S::is_zero(w)) continue;
      weights_.emplace(a, w);
      total = S::add(total, w);
    }
    if (!(total == S::one())) {
      throw DomainError(std::string(S::name) + " distribution is not normalized");
    }
  }

  const Domain& domain() const { return domain_; }
  const std::map<Assignment, value_type>& weights() const { return weights_; }
  value_type weight(const Assignment& a) const {
    auto it = weights_.find(a);
    return it == weights_.end() ? S::zero() : it->second;
  }
  std::vector<Assignment> support() const {
    std::vector<Assignment> out;
    for (const auto& entry : weights_) out.push_back(entry.first);
    return out;
  }
  bool operator==(const Distribution& other) const {
    return domain_ == other.domain_ && weights_ == other.weights_;
  }

 private:
  Domain domain_;
  std::map<Assignment, value_type> weights_;
};

template <class S>
Distribution<S> marginalize(const Distribution<S>& d, const Domain& v) {
  const auto pos = embedding(v, d.domain());
  std::map<Assignment, typename S::value_type> out;
  for (const auto& [a, w] : d.weights()) {
    Assignment r(pos.size());
    for (std::size_t k = 0; k < pos.size(); ++k) r[k] = a[pos[k]];
    auto it = out.find(r);
    if (it == out.end()) {
      out.emplace(std::move(r), w);
    } else {
      it->second = S::add(it->second, w);
    }
  }
  return Distribution<S>(v, out);
}

template <class S>
class EmpiricalModel {
 public:
  EmpiricalModel(MeasurementScenario scenario, std::vector<Distribution<S>> per_context)
      : scenario_(std::move(scenario)), per_context_(std::move(per_context)) {
    if (per_context_.size() != scenario_.cover().size()) {
      throw StructuralError("one distribution per context is required");
    }
    for (std::size_t c = 0; c < per_context_.size(); ++c) {
      if (per_context_[c].domain() != scenario_.cover()[c].measurements) {
        throw StructuralError("distribution domain differs from context " + scenario_.cover()[c].name);
      }
      for (const auto& [a, w] : per_context_[c].weights()) {
        for (Integer v : a) {
          if (v < 0 || v >= scenario_.outcome_group().order()) {
            throw StructuralError("outcome index out of range");
          }
        }
      }
    }
  }

  const MeasurementScenario& scenario() const { return scenario_; }
  const std::vector<Distribution<S>>& distributions() const { return per_context_; }
  const Distribution<S>& at(std::size_t context) const { return per_context_.at(context); }

 private:
  MeasurementScenario scenario_;
  std::vector<Distribution<S>> per_context_;
};

using BooleanModel = EmpiricalModel<BooleanSemiring>;
using ProbabilisticModel = EmpiricalModel<ProbabilitySemiring>;
using SignedModel = EmpiricalModel<SignedSemiring>;

template <class S>
bool is_no_signalling(const EmpiricalModel<S>& m) {
  const auto& cover = m.scenario().cover();
  for (std::size_t a = 0; a < cover.size(); ++a) {
    for (std::size_t b = a + 1; b < cover.size(); ++b) {
      Domain overlap = domain_intersection(cover[a].measurements, cover[b].measurements);
      if (!(marginalize(m.at(a), overlap) == marginalize(m.at(b), overlap))) return false;
    }
  }
  return true;
}

BooleanModel possibilize(const ProbabilisticModel& m);

// ------------------------------------------------------------ support sections

// Per context, the support of e_C as a set of assignments over that context.
using SupportTable = std::vector<std::set<Assignment>>;

template <class S>
SupportTable support_table(const EmpiricalModel<S>& m) {
  SupportTable out;
  for (const auto& d : m.distributions()) {
    auto s = d.support();
    out.emplace_back(s.begin(), s.end());
  }
  return out;
}

// Sections over U whose restriction to each U n C lies in the marginal support
// of e_C, in enumeration order (first measurement most significant).
std::vector<Section> support_presheaf_at(const MeasurementScenario& scenario,
                                         const SupportTable& supports, const Domain& u);

template <class S>
std::vector<Section> support_presheaf_at(const EmpiricalModel<S>& m, const Domain& u) {
  return support_presheaf_at(m.scenario(), support_table(m), u);
}

// First global section (enumeration order) compatible with every support, or
// none iff the model is strongly contextual.
std::optional<Section> find_global_section_possibilistic(const MeasurementScenario& scenario,
                                                         const SupportTable& supports);

template <class S>
std::optional<Section> find_global_section_possibilistic(const EmpiricalModel<S>& m) {
  return find_global_section_possibilistic(m.scenario(), support_table(m));
}

// Exact feasibility over deterministic global sections. PreconditionError on a
// signalling model.
std::optional<Distribution<ProbabilitySemiring>> find_global_section_probabilistic(
    const ProbabilisticModel& m);

// Some signed global section with exact marginals. InvariantViolation if none
// is found; DomainError if K^X is too large to enumerate.
Distribution<SignedSemiring> find_signed_global_section(const ProbabilisticModel& m);

template <class S, class T>
bool marginalizes_to(const Distribution<S>& global, const EmpiricalModel<T>& m) {
  for (std::size_t c = 0; c < m.distributions().size(); ++c) {
    auto marginal = marginalize(global, m.scenario().cover()[c].measurements);
    for (const auto& [a, w] : m.at(c).weights()) {
      if (!(marginal.weight(a) == w)) return false;
    }
    for (const auto& [a, w] : marginal.weights()) {
      if (!(m.at(c).weight(a) == w)) return false;
    }
  }
  return true;
}

enum class ContextualityLevel {
  NonContextual,
  ProbabilisticallyContextual,
  PossibilisticallyContextual,
  StronglyContextual,
};

std::string to_string(ContextualityLevel level);

// Every support section of every context extends to a global section drawn
// from the support presheaf.
bool is_possibilistically_extendable(const MeasurementScenario& scenario,
                                     const SupportTable& supports);

ContextualityLevel classify(const ProbabilisticModel& m);

bool check_flasque_beneath_cover(const MeasurementScenario& scenario, const SupportTable& supports);

template <class S>
bool check_flasque_beneath_cover(const EmpiricalModel<S>& m) {
  return check_flasque_beneath_cover(m.scenario(), support_table(m));
}

}  // namespace ctxf
