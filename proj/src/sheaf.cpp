#include "ctxf/sheaf.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <limits>

#include "ctxf/exact_linalg.hpp"
#include "ctxf/parallel.hpp"

namespace ctxf {

// ------------------------------------------------------------------ scenarios

MeasurementScenario::MeasurementScenario(std::vector<std::string> measurements,
                                         FiniteAbelianGroup outcomes, std::vector<Context> cover)
    : measurements_(std::move(measurements)), outcomes_(std::move(outcomes)), cover_(std::move(cover)) {
  std::set<std::string> seen;
  for (const auto& m : measurements_) {
    if (!seen.insert(m).second) throw StructuralError("duplicate measurement label " + m);
  }
  std::vector<bool> covered(measurements_.size(), false);
  for (auto& c : cover_) {
    std::sort(c.measurements.begin(), c.measurements.end());
    c.measurements.erase(std::unique(c.measurements.begin(), c.measurements.end()),
                         c.measurements.end());
    for (auto i : c.measurements) {
      if (i >= measurements_.size()) throw StructuralError("context " + c.name + " names an unknown measurement");
      covered[i] = true;
    }
  }
  for (std::size_t i = 0; i < covered.size(); ++i) {
    if (!covered[i]) throw StructuralError("measurement " + measurements_[i] + " lies in no context");
  }
}

std::size_t MeasurementScenario::measurement_index(const std::string& label) const {
  auto it = std::find(measurements_.begin(), measurements_.end(), label);
  if (it == measurements_.end()) throw StructuralError("unknown measurement " + label);
  return static_cast<std::size_t>(it - measurements_.begin());
}

std::size_t MeasurementScenario::context_index(const std::string& name) const {
  for (std::size_t c = 0; c < cover_.size(); ++c) {
    if (cover_[c].name == name) return c;
  }
  throw StructuralError("unknown context " + name);
}

Domain MeasurementScenario::all_measurements() const {
  Domain out(measurements_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = i;
  return out;
}

Domain domain_intersection(const Domain& a, const Domain& b) {
  Domain out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool domain_subset(const Domain& v, const Domain& u) {
  return std::includes(u.begin(), u.end(), v.begin(), v.end());
}

std::vector<std::size_t> embedding(const Domain& v, const Domain& u) {
  std::vector<std::size_t> pos;
  pos.reserve(v.size());
  std::size_t j = 0;
  for (auto m : v) {
    while (j < u.size() && u[j] < m) ++j;
    if (j == u.size() || u[j] != m) throw DomainError("restriction target is not a subset of the domain");
    pos.push_back(j);
  }
  return pos;
}

Section restrict_section(const Section& s, const Domain& v) {
  const auto pos = embedding(v, s.domain);
  Section out{v, Assignment(pos.size())};
  for (std::size_t k = 0; k < pos.size(); ++k) out.values[k] = s.values[pos[k]];
  return out;
}

std::string format_section(const MeasurementScenario& scenario, const Section& s) {
  const auto& g = scenario.outcome_group();
  std::string out;
  for (std::size_t k = 0; k < s.domain.size(); ++k) {
    if (k) out += ", ";
    GroupElement e = g.element(s.values[k]);
    out += scenario.measurements()[s.domain[k]] + "=" +
           (g.rank() == 1 ? std::to_string(e.residues()[0]) : g.format(e));
  }
  return out;
}

BooleanModel possibilize(const ProbabilisticModel& m) {
  std::vector<Distribution<BooleanSemiring>> out;
  for (const auto& d : m.distributions()) {
    std::map<Assignment, bool> w;
    for (const auto& entry : d.weights()) w.emplace(entry.first, true);
    out.emplace_back(d.domain(), w);
  }
  return BooleanModel(m.scenario(), std::move(out));
}

std::string to_string(ContextualityLevel level) {
  switch (level) {
    case ContextualityLevel::NonContextual:
      return "NonContextual";
    case ContextualityLevel::ProbabilisticallyContextual:
      return "ProbabilisticallyContextual";
    case ContextualityLevel::PossibilisticallyContextual:
      return "PossibilisticallyContextual";
    case ContextualityLevel::StronglyContextual:
      return "StronglyContextual";
  }
  return "unknown";
}

// ------------------------------------------------------------ section search

namespace {

// Backtracking over K^U in enumeration order, pruning partial assignments whose
// prefix on some U n C is not a prefix of a marginal support section of e_C.
class SectionSearch {
 public:
  SectionSearch(const MeasurementScenario& scenario, const SupportTable& supports, Domain u)
      : d_(scenario.outcome_group().order()), u_(std::move(u)), checks_(u_.size()) {
    if (supports.size() != scenario.cover().size()) {
      throw StructuralError("support table does not match the cover");
    }
    for (std::size_t c = 0; c < supports.size(); ++c) {
      const Domain& ctx = scenario.cover()[c].measurements;
      Domain local = domain_intersection(u_, ctx);
      if (local.empty()) continue;
      const auto in_ctx = embedding(local, ctx);
      const auto in_u = embedding(local, u_);
      Restriction r;
      r.positions = in_u;
      r.prefixes.resize(local.size() + 1);
      for (const auto& a : supports[c]) {
        Assignment prefix;
        for (std::size_t t = 0; t < local.size(); ++t) {
          prefix.push_back(a[in_ctx[t]]);
          r.prefixes[t + 1].insert(prefix);
        }
      }
      for (std::size_t t = 0; t < local.size(); ++t) checks_[in_u[t]].emplace_back(restrictions_.size(), t + 1);
      restrictions_.push_back(std::move(r));
    }
  }

  const Domain& domain() const { return u_; }

  // Visits compatible sections in order while visit returns true. The first
  // `fixed` values of start are held fixed. Returns false if stopped early.
  bool run(const Assignment& start, std::size_t fixed, const std::function<bool(const Assignment&)>& visit,
           const std::atomic<bool>* cancel = nullptr) const {
    Assignment values = start;
    values.resize(u_.size(), 0);
    for (std::size_t pos = 0; pos < fixed; ++pos) {
      if (!consistent(values, pos)) return true;
    }
    return descend(values, fixed, visit, cancel);
  }

 private:
  struct Restriction {
    std::vector<std::size_t> positions;
    std::vector<std::set<Assignment>> prefixes;  // by prefix length
  };

  bool consistent(const Assignment& values, std::size_t pos) const {
    for (const auto& [r, len] : checks_[pos]) {
      const auto& restriction = restrictions_[r];
      Assignment prefix(len);
      for (std::size_t t = 0; t < len; ++t) prefix[t] = values[restriction.positions[t]];
      if (!restriction.prefixes[len].count(prefix)) return false;
    }
    return true;
  }

  bool descend(Assignment& values, std::size_t pos, const std::function<bool(const Assignment&)>& visit,
               const std::atomic<bool>* cancel) const {
    if (cancel && cancel->load(std::memory_order_relaxed)) return false;
    if (pos == u_.size()) return visit(values);
    for (Integer v = 0; v < d_; ++v) {
      values[pos] = v;
      if (!consistent(values, pos)) continue;
      if (!descend(values, pos + 1, visit, cancel)) return false;
    }
    return true;
  }

  Integer d_;
  Domain u_;
  std::vector<Restriction> restrictions_;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> checks_;
};

// Dense tableaus beyond this many cells are refused rather than attempted.
constexpr std::size_t kMaxTableauCells = 8'000'000;
// Signed sections enumerate K^X in full.
constexpr std::size_t kMaxSignedColumns = 1u << 16;

}  // namespace

std::vector<Section> support_presheaf_at(const MeasurementScenario& scenario,
                                         const SupportTable& supports, const Domain& u) {
  for (auto m : u) {
    if (m >= scenario.measurements().size()) throw DomainError("unknown measurement index");
  }
  SectionSearch search(scenario, supports, u);
  std::vector<Section> out;
  search.run({}, 0, [&](const Assignment& a) {
    out.push_back(Section{u, a});
    return true;
  });
  return out;
}

std::optional<Section> find_global_section_possibilistic(const MeasurementScenario& scenario,
                                                         const SupportTable& supports) {
  const Domain all = scenario.all_measurements();
  SectionSearch search(scenario, supports, all);
  const auto d = static_cast<std::size_t>(scenario.outcome_group().order());
  if (all.empty()) return Section{};

  // One branch per value of the first measurement; the lowest branch with a
  // witness wins, so the result matches the sequential search.
  std::vector<std::optional<Assignment>> found(d);
  std::vector<std::atomic<bool>> cancel(d);
  for (auto& c : cancel) c = false;
  parallel_for(d, [&](std::size_t branch) {
    search.run({static_cast<Integer>(branch)}, 1,
               [&](const Assignment& a) {
                 found[branch] = a;
                 for (std::size_t later = branch + 1; later < d; ++later) cancel[later] = true;
                 return false;
               },
               &cancel[branch]);
  });
  for (auto& f : found) {
    if (f) return Section{all, *f};
  }
  return std::nullopt;
}

bool is_possibilistically_extendable(const MeasurementScenario& scenario,
                                     const SupportTable& supports) {
  const auto global = support_presheaf_at(scenario, supports, scenario.all_measurements());
  for (std::size_t c = 0; c < supports.size(); ++c) {
    std::set<Assignment> reached;
    for (const auto& g : global) reached.insert(restrict_section(g, scenario.cover()[c].measurements).values);
    for (const auto& s : supports[c]) {
      if (!reached.count(s)) return false;
    }
  }
  return true;
}

std::optional<Distribution<ProbabilitySemiring>> find_global_section_probabilistic(
    const ProbabilisticModel& m) {
  if (!is_no_signalling(m)) throw PreconditionError("model is signalling");
  const auto& scenario = m.scenario();
  const SupportTable supports = support_table(m);
  // A global section with nonzero weight must restrict into every support, so
  // only sections of the support presheaf are candidate columns.
  const auto columns = support_presheaf_at(scenario, supports, scenario.all_measurements());
  if (columns.empty()) return std::nullopt;

  // Uniform weight on the candidates is often already a solution; try it
  // before paying for the simplex.
  {
    std::map<Assignment, mpq_class> uniform;
    const mpq_class w(1, columns.size());
    for (const auto& col : columns) uniform.emplace(col.values, w);
    Distribution<ProbabilitySemiring> guess(scenario.all_measurements(), uniform);
    if (marginalizes_to(guess, m)) return guess;
  }

  std::vector<std::map<Assignment, std::size_t>> row_of(supports.size());
  std::vector<mpq_class> rhs;
  for (std::size_t c = 0; c < supports.size(); ++c) {
    for (const auto& [a, w] : m.at(c).weights()) {
      row_of[c].emplace(a, rhs.size());
      rhs.push_back(w);
    }
  }
  if ((columns.size() + rhs.size()) * (rhs.size() + 1) > kMaxTableauCells) {
    throw DomainError("probabilistic extension problem too large for the dense exact tableau");
  }
  SparseMatrix a(rhs.size(), columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) {
    for (std::size_t c = 0; c < supports.size(); ++c) {
      auto r = restrict_section(columns[j], scenario.cover()[c].measurements);
      a.entries[row_of[c].at(r.values)].emplace_back(j, 1);
    }
  }
  auto x = find_nonnegative_solution(a, rhs);
  if (!x) return std::nullopt;
  std::map<Assignment, mpq_class> weights;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (sgn((*x)[j]) != 0) weights.emplace(columns[j].values, (*x)[j]);
  }
  Distribution<ProbabilitySemiring> out(scenario.all_measurements(), weights);
  if (!marginalizes_to(out, m)) throw InvariantViolation("global section does not reproduce the model");
  return out;
}

Distribution<SignedSemiring> find_signed_global_section(const ProbabilisticModel& m) {
  if (!is_no_signalling(m)) throw PreconditionError("model is signalling");
  const auto& scenario = m.scenario();
  const auto d = static_cast<std::size_t>(scenario.outcome_group().order());
  const std::size_t n = scenario.measurements().size();
  std::size_t columns = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (columns > kMaxSignedColumns / d) throw DomainError("K^X is too large for a signed section");
    columns *= d;
  }

  // Row (C, s) for every s in K^C, indexed base D with the first measurement
  // of C most significant.
  const auto& cover = scenario.cover();
  std::vector<std::size_t> row_offset;
  std::size_t rows = 0;
  for (const auto& c : cover) {
    row_offset.push_back(rows);
    std::size_t block = 1;
    for (std::size_t i = 0; i < c.measurements.size(); ++i) block *= d;
    rows += block;
  }
  std::vector<mpq_class> rhs(rows);
  for (std::size_t c = 0; c < cover.size(); ++c) {
    for (const auto& [a, w] : m.at(c).weights()) {
      std::size_t idx = 0;
      for (Integer v : a) idx = idx * d + static_cast<std::size_t>(v);
      rhs[row_offset[c] + idx] = w;
    }
  }
  SparseMatrix a(rows, columns);
  Assignment g(n, 0);
  for (std::size_t j = 0; j < columns; ++j) {
    std::size_t rest = j;
    for (std::size_t i = n; i-- > 0;) {
      g[i] = static_cast<Integer>(rest % d);
      rest /= d;
    }
    for (std::size_t c = 0; c < cover.size(); ++c) {
      std::size_t idx = 0;
      for (auto meas : cover[c].measurements) idx = idx * d + static_cast<std::size_t>(g[meas]);
      a.entries[row_offset[c] + idx].emplace_back(j, 1);
    }
  }
  auto x = find_rational_solution(a, rhs);
  if (!x) throw InvariantViolation("no signed global section found for a no-signalling model");
  std::map<Assignment, mpq_class> weights;
  for (std::size_t j = 0; j < columns; ++j) {
    if (sgn((*x)[j]) == 0) continue;
    std::size_t rest = j;
    for (std::size_t i = n; i-- > 0;) {
      g[i] = static_cast<Integer>(rest % d);
      rest /= d;
    }
    weights.emplace(g, (*x)[j]);
  }
  Distribution<SignedSemiring> out(scenario.all_measurements(), weights);
  if (!marginalizes_to(out, m)) throw InvariantViolation("signed section does not reproduce the model");
  return out;
}

ContextualityLevel classify(const ProbabilisticModel& m) {
  if (!is_no_signalling(m)) throw PreconditionError("model is signalling");
  const SupportTable supports = support_table(m);
  if (!find_global_section_possibilistic(m.scenario(), supports)) {
    return ContextualityLevel::StronglyContextual;
  }
  if (!is_possibilistically_extendable(m.scenario(), supports)) {
    return ContextualityLevel::PossibilisticallyContextual;
  }
  if (!find_global_section_probabilistic(m)) return ContextualityLevel::ProbabilisticallyContextual;
  return ContextualityLevel::NonContextual;
}

bool check_flasque_beneath_cover(const MeasurementScenario& scenario, const SupportTable& supports) {
  std::map<Domain, std::set<Assignment>> memo;
  auto sections_at = [&](const Domain& u) -> const std::set<Assignment>& {
    auto it = memo.find(u);
    if (it != memo.end()) return it->second;
    std::set<Assignment> s;
    for (const auto& sec : support_presheaf_at(scenario, supports, u)) s.insert(sec.values);
    return memo.emplace(u, std::move(s)).first->second;
  };
  auto subdomain = [](const Domain& c, std::size_t mask) {
    Domain out;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (mask >> i & 1) out.push_back(c[i]);
    }
    return out;
  };
  for (const auto& ctx : scenario.cover()) {
    const Domain& c = ctx.measurements;
    if (c.size() >= std::numeric_limits<std::size_t>::digits - 1) throw DomainError("context too large");
    const std::size_t full = (std::size_t{1} << c.size()) - 1;
    for (std::size_t umask = 0; umask <= full; ++umask) {
      const Domain u = subdomain(c, umask);
      const auto& upper = sections_at(u);
      // Submasks of umask, including the empty set.
      for (std::size_t vmask = umask;; vmask = (vmask - 1) & umask) {
        const Domain v = subdomain(c, vmask);
        const auto pos = embedding(v, u);
        std::set<Assignment> image;
        for (const auto& a : upper) {
          Assignment r(pos.size());
          for (std::size_t k = 0; k < pos.size(); ++k) r[k] = a[pos[k]];
          image.insert(std::move(r));
        }
        if (image != sections_at(v)) return false;
        if (vmask == 0) break;
      }
    }
  }
  return true;
}

}  // namespace ctxf
