#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ctxf/abgroup.hpp"

namespace ctxf {

using EquationRhs = std::variant<GroupElement, RationalTurn>;

// sum_r n_r * y_r = rhs, valued either in a finite group K or in the circle.
// Terms are kept in first-appearance order; repeated variables are merged and
// zero coefficients dropped, but every mentioned variable stays in variables().
class ZModEquation {
 public:
  ZModEquation(std::vector<std::pair<std::string, Integer>> coeffs, EquationRhs rhs);

  const std::vector<std::pair<std::string, Integer>>& terms() const { return terms_; }
  const std::vector<std::string>& variables() const { return variables_; }
  const EquationRhs& rhs() const { return rhs_; }
  bool is_circle_valued() const { return std::holds_alternative<RationalTurn>(rhs_); }
  Integer coefficient(const std::string& var) const;
  Integer coefficient_sum() const;

  // "2*y1 + 3*y2 = (1)" or "2*y = turn 1/2".
  std::string to_string(const std::optional<FiniteAbelianGroup>& group) const;

 private:
  std::vector<std::pair<std::string, Integer>> terms_;
  std::vector<std::string> variables_;
  EquationRhs rhs_;
};

// A list of equations over a shared variable universe. A present group means the
// system is K-valued; std::nullopt means circle-valued.
class EquationSystem {
 public:
  EquationSystem(std::vector<ZModEquation> equations, std::optional<FiniteAbelianGroup> group);
  static EquationSystem over_group(std::vector<ZModEquation> equations, FiniteAbelianGroup group);
  static EquationSystem over_circle(std::vector<ZModEquation> equations);

  const std::vector<ZModEquation>& equations() const { return equations_; }
  const std::vector<std::string>& variables() const { return variables_; }
  const std::optional<FiniteAbelianGroup>& group() const { return group_; }
  bool is_circle_valued() const { return !group_.has_value(); }
  std::size_t variable_index(const std::string& name) const;

  // Row s, column r holds n^s_r.
  std::vector<std::vector<Integer>> coefficient_matrix() const;

 private:
  std::vector<ZModEquation> equations_;
  std::optional<FiniteAbelianGroup> group_;
  std::vector<std::string> variables_;
};

using GroupAssignment = std::map<std::string, GroupElement>;
using TurnAssignment = std::map<std::string, RationalTurn>;
using TorusAssignment = std::map<std::string, TorusPoint>;

// Integer row reduction U * A = E with U unimodular and E in row echelon form
// with positive pivots. Rows of U facing zero rows of E generate the integer
// left kernel of A.
struct HermiteReduction {
  std::vector<std::vector<mpz_class>> echelon;
  std::vector<std::vector<mpz_class>> transform;
  std::vector<std::size_t> pivot_columns;  // one per nonzero echelon row
  std::size_t rank() const { return pivot_columns.size(); }
};

HermiteReduction hermite_reduce(const std::vector<std::vector<Integer>>& matrix,
                                std::size_t columns);

// Generators of { c in Z^S : c * A = 0 }.
std::vector<std::vector<mpz_class>> integer_left_kernel(const EquationSystem& sys);

// An integer relation among the rows whose combination of right-hand sides is
// nonzero, if one exists among the kernel generators.
std::optional<std::vector<mpz_class>> find_violated_relation(const EquationSystem& sys);
bool check_consistency(const EquationSystem& sys);

// First satisfying assignment in enumeration order (first variable most
// significant, elements in group index order), or none.
std::optional<GroupAssignment> solve_in_group(const EquationSystem& sys);

struct CircleSolutionSet {
  std::vector<std::string> variables;
  // Per variable, the sorted values it takes across joint_solutions.
  std::vector<std::vector<RationalTurn>> candidates;
  // Every joint solution produced by the elimination, sorted lexicographically.
  // Non-pivot variables are fixed at 0.
  std::vector<std::vector<RationalTurn>> joint_solutions;

  const std::vector<RationalTurn>& least() const { return joint_solutions.front(); }
  TurnAssignment least_assignment() const;
};

// Multi-valued Gaussian elimination over R/Z. Returns none iff the system is
// inconsistent.
std::optional<CircleSolutionSet> gaussian_eliminate_circle(const EquationSystem& sys);

// Solves a consistent K-valued system in the torus T^{D-1} one coordinate at a
// time. Throws ConsistencyError naming a violated relation otherwise.
TorusAssignment solve_torus(const EquationSystem& sys);

bool verify_solution(const EquationSystem& sys, const GroupAssignment& assignment);
bool verify_solution(const EquationSystem& sys, const TurnAssignment& assignment);
bool verify_solution(const EquationSystem& sys, const TorusAssignment& assignment);

// (p/q)A = { p*b : q*b in A } for a finite set A of turns.
std::vector<RationalTurn> scale_turn_set(const std::vector<RationalTurn>& set, Integer p, Integer q);

std::string format_relation(const std::vector<mpz_class>& relation);

}  // namespace ctxf
