#include "ctxf/zsolve.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>
#include <sstream>

#include "ctxf/errors.hpp"
#include "ctxf/parallel.hpp"

namespace ctxf {

std::size_t worker_count() {
  if (const char* env = std::getenv("CTXF_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

namespace {

// Joint solutions are enumerated exhaustively; this bounds the product of the
// pivots so a pathological system fails loudly instead of exhausting memory.
constexpr std::size_t kMaxJointSolutions = 1u << 20;

mpz_class to_mpz(Integer v) { return mpz_class(static_cast<long>(v)); }

mpz_class floor_div(const mpz_class& a, const mpz_class& b) {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

}  // namespace

// ---------------------------------------------------------------- ZModEquation

ZModEquation::ZModEquation(std::vector<std::pair<std::string, Integer>> coeffs, EquationRhs rhs)
    : rhs_(std::move(rhs)) {
  if (coeffs.empty()) throw StructuralError("an equation needs at least one variable");
  std::vector<Integer> merged;
  for (auto& [name, n] : coeffs) {
    if (name.empty()) throw StructuralError("empty variable name");
    auto it = std::find(variables_.begin(), variables_.end(), name);
    if (it == variables_.end()) {
      variables_.push_back(name);
      merged.push_back(n);
    } else {
      merged[static_cast<std::size_t>(it - variables_.begin())] += n;
    }
  }
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (merged[i] != 0) terms_.emplace_back(variables_[i], merged[i]);
  }
}

Integer ZModEquation::coefficient(const std::string& var) const {
  for (const auto& [name, n] : terms_) {
    if (name == var) return n;
  }
  return 0;
}

Integer ZModEquation::coefficient_sum() const {
  Integer sum = 0;
  for (const auto& term : terms_) sum += term.second;
  return sum;
}

std::string ZModEquation::to_string(const std::optional<FiniteAbelianGroup>& group) const {
  std::ostringstream out;
  if (terms_.empty()) out << "0";
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const auto& [name, n] = terms_[i];
    Integer magnitude = n < 0 ? -n : n;
    if (i == 0) {
      if (n < 0) out << "-";
    } else {
      out << (n < 0 ? " - " : " + ");
    }
    if (magnitude != 1) out << magnitude << "*";
    out << name;
  }
  out << " = ";
  if (const auto* g = std::get_if<GroupElement>(&rhs_)) {
    if (group) {
      out << group->format(*g);
    } else {
      out << "(";
      for (std::size_t j = 0; j < g->rank(); ++j) out << (j ? "," : "") << g->residues()[j];
      out << ")";
    }
  } else {
    out << "turn " << std::get<RationalTurn>(rhs_).to_string();
  }
  return out.str();
}

// -------------------------------------------------------------- EquationSystem

EquationSystem::EquationSystem(std::vector<ZModEquation> equations,
                               std::optional<FiniteAbelianGroup> group)
    : equations_(std::move(equations)), group_(std::move(group)) {
  for (const auto& eq : equations_) {
    if (group_) {
      const auto* rhs = std::get_if<GroupElement>(&eq.rhs());
      if (!rhs) throw StructuralError("circle-valued rhs in a system over " + group_->to_string());
      if (!group_->contains(*rhs)) {
        throw StructuralError("rhs does not lie in " + group_->to_string());
      }
    } else if (!eq.is_circle_valued()) {
      throw StructuralError("group-valued rhs in a circle-valued system");
    }
    for (const auto& v : eq.variables()) {
      if (std::find(variables_.begin(), variables_.end(), v) == variables_.end()) {
        variables_.push_back(v);
      }
    }
  }
}

EquationSystem EquationSystem::over_group(std::vector<ZModEquation> equations,
                                          FiniteAbelianGroup group) {
  return EquationSystem(std::move(equations), std::move(group));
}

EquationSystem EquationSystem::over_circle(std::vector<ZModEquation> equations) {
  return EquationSystem(std::move(equations), std::nullopt);
}

std::size_t EquationSystem::variable_index(const std::string& name) const {
  auto it = std::find(variables_.begin(), variables_.end(), name);
  if (it == variables_.end()) throw StructuralError("unknown variable '" + name + "'");
  return static_cast<std::size_t>(it - variables_.begin());
}

std::vector<std::vector<Integer>> EquationSystem::coefficient_matrix() const {
  std::vector<std::vector<Integer>> a(equations_.size(),
                                      std::vector<Integer>(variables_.size(), 0));
  for (std::size_t s = 0; s < equations_.size(); ++s) {
    for (const auto& [name, n] : equations_[s].terms()) a[s][variable_index(name)] = n;
  }
  return a;
}

// ------------------------------------------------------------ Hermite reduction

HermiteReduction hermite_reduce(const std::vector<std::vector<Integer>>& matrix,
                                std::size_t columns) {
  const std::size_t rows = matrix.size();
  HermiteReduction h;
  h.echelon.assign(rows, std::vector<mpz_class>(columns));
  h.transform.assign(rows, std::vector<mpz_class>(rows));
  for (std::size_t i = 0; i < rows; ++i) {
    if (matrix[i].size() != columns) throw StructuralError("ragged coefficient matrix");
    for (std::size_t j = 0; j < columns; ++j) h.echelon[i][j] = to_mpz(matrix[i][j]);
    h.transform[i][i] = 1;
  }
  auto& e = h.echelon;
  auto& u = h.transform;
  auto subtract_row = [&](std::size_t target, std::size_t source, const mpz_class& q) {
    for (std::size_t j = 0; j < columns; ++j) e[target][j] -= q * e[source][j];
    for (std::size_t j = 0; j < rows; ++j) u[target][j] -= q * u[source][j];
  };

  std::size_t r = 0;
  for (std::size_t c = 0; c < columns && r < rows; ++c) {
    while (true) {
      // Smallest nonzero magnitude at or below row r becomes the pivot candidate.
      std::size_t best = rows;
      for (std::size_t i = r; i < rows; ++i) {
        if (e[i][c] != 0 && (best == rows || abs(e[i][c]) < abs(e[best][c]))) best = i;
      }
      if (best == rows) break;
      std::swap(e[r], e[best]);
      std::swap(u[r], u[best]);
      bool clean = true;
      for (std::size_t i = r + 1; i < rows; ++i) {
        if (e[i][c] == 0) continue;
        subtract_row(i, r, floor_div(e[i][c], e[r][c]));
        if (e[i][c] != 0) clean = false;
      }
      if (clean) break;
    }
    if (r >= rows || e[r][c] == 0) continue;
    if (e[r][c] < 0) {
      for (auto& v : e[r]) v = -v;
      for (auto& v : u[r]) v = -v;
    }
    // Keep entries above the pivot in [0, pivot) so numbers stay small.
    for (std::size_t i = 0; i < r; ++i) {
      if (e[i][c] != 0) subtract_row(i, r, floor_div(e[i][c], e[r][c]));
    }
    h.pivot_columns.push_back(c);
    ++r;
  }
  return h;
}

std::vector<std::vector<mpz_class>> integer_left_kernel(const EquationSystem& sys) {
  HermiteReduction h = hermite_reduce(sys.coefficient_matrix(), sys.variables().size());
  return {h.transform.begin() + static_cast<std::ptrdiff_t>(h.rank()), h.transform.end()};
}

std::optional<std::vector<mpz_class>> find_violated_relation(const EquationSystem& sys) {
  if (sys.is_circle_valued()) {
    throw UnsupportedValueGroupError(
        "consistency checking needs a K-valued system; circle systems are handled by the solver");
  }
  const FiniteAbelianGroup& k = *sys.group();
  for (auto& relation : integer_left_kernel(sys)) {
    GroupElement combined = k.zero();
    for (std::size_t s = 0; s < relation.size(); ++s) {
      const auto& a = std::get<GroupElement>(sys.equations()[s].rhs());
      combined = k.add(combined, k.scalar_mul(relation[s], a));
    }
    if (combined != k.zero()) return relation;
  }
  return std::nullopt;
}

bool check_consistency(const EquationSystem& sys) { return !find_violated_relation(sys); }

std::string format_relation(const std::vector<mpz_class>& relation) {
  std::string out = "(";
  for (std::size_t i = 0; i < relation.size(); ++i) {
    if (i) out += ", ";
    out += relation[i].get_str();
  }
  return out + ")";
}

// ---------------------------------------------------------------- group search

std::optional<GroupAssignment> solve_in_group(const EquationSystem& sys) {
  if (sys.is_circle_valued()) {
    throw UnsupportedValueGroupError("solve_in_group needs a K-valued system");
  }
  const FiniteAbelianGroup& k = *sys.group();
  const auto a = sys.coefficient_matrix();
  const std::size_t m = sys.variables().size();
  std::vector<Integer> targets;
  for (const auto& eq : sys.equations()) targets.push_back(k.index_of(std::get<GroupElement>(eq.rhs())));

  std::vector<Integer> x(m, 0);
  while (true) {
    bool ok = true;
    for (std::size_t s = 0; s < a.size() && ok; ++s) {
      Integer acc = 0;
      for (std::size_t r = 0; r < m; ++r) {
        if (a[s][r] != 0) acc = k.add_index(acc, k.scalar_mul_index(a[s][r], x[r]));
      }
      ok = acc == targets[s];
    }
    if (ok) {
      GroupAssignment out;
      for (std::size_t r = 0; r < m; ++r) out[sys.variables()[r]] = k.element(x[r]);
      return out;
    }
    // Odometer with the first variable most significant.
    std::size_t pos = m;
    while (pos > 0) {
      --pos;
      if (++x[pos] < k.order()) break;
      x[pos] = 0;
      if (pos == 0) return std::nullopt;
    }
    if (m == 0) return std::nullopt;
  }
}

// -------------------------------------------------------- circle elimination

std::vector<RationalTurn> scale_turn_set(const std::vector<RationalTurn>& set, Integer p,
                                         Integer q) {
  if (p == 0 || q == 0) throw StructuralError("scaling a turn set needs a nonzero rational");
  if (q < 0) {
    p = -p;
    q = -q;
  }
  std::set<RationalTurn> out;
  for (const auto& a : set) {
    // q*b = a has exactly q solutions b = (a + t)/q.
    for (Integer t = 0; t < q; ++t) {
      Rational b = (a.value() + Rational(to_mpz(t))) / Rational(to_mpz(q));
      out.insert(RationalTurn(b).times(p));
    }
  }
  return {out.begin(), out.end()};
}

TurnAssignment CircleSolutionSet::least_assignment() const {
  TurnAssignment out;
  const auto& best = least();
  for (std::size_t r = 0; r < variables.size(); ++r) out[variables[r]] = best[r];
  return out;
}

std::optional<CircleSolutionSet> gaussian_eliminate_circle(const EquationSystem& sys) {
  if (!sys.is_circle_valued()) {
    throw UnsupportedValueGroupError("gaussian_eliminate_circle needs a circle-valued system");
  }
  const std::size_t m = sys.variables().size();
  const std::size_t rows = sys.equations().size();
  HermiteReduction h = hermite_reduce(sys.coefficient_matrix(), m);

  // Transform the right-hand sides along with the rows.
  std::vector<RationalTurn> rhs(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    RationalTurn acc;
    for (std::size_t j = 0; j < rows; ++j) {
      if (h.transform[i][j] != 0) {
        acc = acc + std::get<RationalTurn>(sys.equations()[j].rhs()).times(h.transform[i][j]);
      }
    }
    rhs[i] = acc;
  }
  // A zero row demands a zero right-hand side.
  for (std::size_t i = h.rank(); i < rows; ++i) {
    if (!rhs[i].is_zero()) return std::nullopt;
  }

  // Back-substitution: each pivot division is multi-valued, so carry every branch.
  std::vector<std::vector<RationalTurn>> partial{std::vector<RationalTurn>(m)};
  for (std::size_t i = h.rank(); i-- > 0;) {
    const std::size_t c = h.pivot_columns[i];
    const mpz_class& pivot = h.echelon[i][c];
    if (!pivot.fits_slong_p()) throw InvariantViolation("pivot too large for enumeration");
    std::vector<std::vector<RationalTurn>> next;
    for (const auto& x : partial) {
      RationalTurn v = rhs[i];
      for (std::size_t j = c + 1; j < m; ++j) {
        if (h.echelon[i][j] != 0) v = v - x[j].times(h.echelon[i][j]);
      }
      for (const auto& value : scale_turn_set({v}, 1, pivot.get_si())) {
        auto extended = x;
        extended[c] = value;
        next.push_back(std::move(extended));
        if (next.size() > kMaxJointSolutions) {
          throw InvariantViolation("circle solution set exceeds enumeration limit");
        }
      }
    }
    partial = std::move(next);
  }

  CircleSolutionSet out;
  out.variables = sys.variables();
  std::sort(partial.begin(), partial.end());
  partial.erase(std::unique(partial.begin(), partial.end()), partial.end());
  for (const auto& x : partial) {
    TurnAssignment check;
    for (std::size_t r = 0; r < m; ++r) check[out.variables[r]] = x[r];
    if (!verify_solution(sys, check)) {
      throw InvariantViolation("circle elimination produced a non-solution");
    }
  }
  out.candidates.resize(m);
  for (std::size_t r = 0; r < m; ++r) {
    std::set<RationalTurn> values;
    for (const auto& x : partial) values.insert(x[r]);
    out.candidates[r].assign(values.begin(), values.end());
  }
  out.joint_solutions = std::move(partial);
  return out;
}

// ----------------------------------------------------------------- torus solve

TorusAssignment solve_torus(const EquationSystem& sys) {
  if (sys.is_circle_valued()) throw UnsupportedValueGroupError("solve_torus needs a K-valued system");
  if (auto relation = find_violated_relation(sys)) {
    throw ConsistencyError("inconsistent system: integer relation " + format_relation(*relation) +
                           " on the rows does not annihilate the right-hand sides");
  }
  const FiniteAbelianGroup& k = *sys.group();
  const std::size_t m = sys.variables().size();
  const std::size_t coords = static_cast<std::size_t>(k.order() - 1);

  std::vector<TorusPoint> rhs_points;
  for (const auto& eq : sys.equations()) {
    rhs_points.push_back(k.classical_to_torus(std::get<GroupElement>(eq.rhs())));
  }

  // Coordinates are independent circle systems; selection happens per slot.
  std::vector<std::vector<RationalTurn>> per_coord(coords);
  parallel_for(coords, [&](std::size_t y) {
    // Every row lists every variable so the universe and its order match sys.
    std::vector<ZModEquation> circle;
    for (std::size_t s = 0; s < sys.equations().size(); ++s) {
      std::vector<std::pair<std::string, Integer>> coeffs;
      for (const auto& v : sys.variables()) coeffs.emplace_back(v, sys.equations()[s].coefficient(v));
      circle.emplace_back(std::move(coeffs), rhs_points[s].coords()[y]);
    }
    auto solved = gaussian_eliminate_circle(EquationSystem::over_circle(std::move(circle)));
    if (!solved) throw InvariantViolation("consistent system has no circle solution");
    per_coord[y] = solved->least();
  });

  TorusAssignment out;
  for (std::size_t r = 0; r < m; ++r) {
    std::vector<RationalTurn> c(coords);
    for (std::size_t y = 0; y < coords; ++y) c[y] = per_coord[y][r];
    out[sys.variables()[r]] = TorusPoint(std::move(c));
  }
  if (!verify_solution(sys, out)) throw InvariantViolation("torus solution failed verification");
  return out;
}

// --------------------------------------------------------------- verification

bool verify_solution(const EquationSystem& sys, const GroupAssignment& assignment) {
  if (sys.is_circle_valued()) throw UnsupportedValueGroupError("group assignment for a circle system");
  const FiniteAbelianGroup& k = *sys.group();
  for (const auto& v : sys.variables()) {
    auto it = assignment.find(v);
    if (it == assignment.end() || !k.contains(it->second)) return false;
  }
  for (const auto& eq : sys.equations()) {
    GroupElement acc = k.zero();
    for (const auto& [name, n] : eq.terms()) acc = k.add(acc, k.scalar_mul(n, assignment.at(name)));
    if (acc != std::get<GroupElement>(eq.rhs())) return false;
  }
  return true;
}

bool verify_solution(const EquationSystem& sys, const TurnAssignment& assignment) {
  if (!sys.is_circle_valued()) throw UnsupportedValueGroupError("turn assignment for a K-valued system");
  for (const auto& v : sys.variables()) {
    if (!assignment.count(v)) return false;
  }
  for (const auto& eq : sys.equations()) {
    RationalTurn acc;
    for (const auto& [name, n] : eq.terms()) acc = acc + assignment.at(name).times(n);
    if (acc != std::get<RationalTurn>(eq.rhs())) return false;
  }
  return true;
}

bool verify_solution(const EquationSystem& sys, const TorusAssignment& assignment) {
  if (sys.is_circle_valued()) throw UnsupportedValueGroupError("torus assignment for a circle system");
  const FiniteAbelianGroup& k = *sys.group();
  const auto dim = static_cast<std::size_t>(k.order() - 1);
  for (const auto& v : sys.variables()) {
    auto it = assignment.find(v);
    if (it == assignment.end() || it->second.dimension() != dim) return false;
  }
  for (const auto& eq : sys.equations()) {
    TorusPoint acc = TorusPoint::zero(k.order());
    for (const auto& [name, n] : eq.terms()) acc = acc + assignment.at(name).times(n);
    if (acc != k.classical_to_torus(std::get<GroupElement>(eq.rhs()))) return false;
  }
  return true;
}

}  // namespace ctxf
