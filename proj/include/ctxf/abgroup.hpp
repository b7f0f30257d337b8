#pragma once

#include <gmpxx.h>

#include <complex>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ctxf {

using Integer = std::int64_t;
using Rational = mpq_class;

// A point of the circle group R/Z, stored as an exact fraction in [0, 1).
// One full turn corresponds to a phase of 2*pi.
class RationalTurn {
 public:
  RationalTurn() = default;
  explicit RationalTurn(const Rational& value);
  RationalTurn(Integer numerator, Integer denominator);

  const Rational& value() const { return value_; }
  mpz_class numerator() const { return value_.get_num(); }
  mpz_class denominator() const { return value_.get_den(); }
  bool is_zero() const { return value_ == 0; }

  RationalTurn operator+(const RationalTurn& other) const;
  RationalTurn operator-(const RationalTurn& other) const;
  RationalTurn operator-() const;
  RationalTurn times(const mpz_class& n) const;
  RationalTurn times(Integer n) const;

  bool operator==(const RationalTurn& other) const { return value_ == other.value_; }
  std::strong_ordering operator<=>(const RationalTurn& other) const;

  // exp(2*pi*i*t)
  std::complex<double> phase() const;
  double to_double() const { return value_.get_d(); }

  // "0", "1/4", ...
  std::string to_string() const;
  // Accepts "p/q", "p", optionally followed by " turn".
  static RationalTurn parse(std::string_view text);

 private:
  Rational value_{0};
};

class GroupElement {
 public:
  GroupElement() = default;
  explicit GroupElement(std::vector<Integer> residues) : residues_(std::move(residues)) {}

  const std::vector<Integer>& residues() const { return residues_; }
  std::size_t rank() const { return residues_.size(); }

  auto operator<=>(const GroupElement&) const = default;
  bool operator==(const GroupElement&) const = default;

 private:
  std::vector<Integer> residues_;
};

class TorusPoint;

// A finite abelian group Z_{n_1} x ... x Z_{n_J}. The empty factor list is the
// trivial group. Elements are enumerated lexicographically on residues, first
// factor most significant; element index 0 is always the identity.
class FiniteAbelianGroup {
 public:
  FiniteAbelianGroup() = default;
  explicit FiniteAbelianGroup(std::vector<Integer> invariant_factors);

  // "Z2", "z2xZ4", "Z1" (trivial).
  static FiniteAbelianGroup parse(std::string_view literal);
  static FiniteAbelianGroup cyclic(Integer n);

  const std::vector<Integer>& invariant_factors() const { return factors_; }
  Integer order() const { return order_; }
  Integer exponent() const { return exponent_; }
  bool is_trivial() const { return order_ == 1; }
  std::size_t rank() const { return factors_.size(); }

  bool contains(const GroupElement& g) const;
  GroupElement zero() const;
  GroupElement element(Integer index) const;
  Integer index_of(const GroupElement& g) const;
  std::vector<GroupElement> elements() const;
  // Reduces arbitrary integer residues into range.
  GroupElement make(std::vector<Integer> residues) const;

  GroupElement add(const GroupElement& g, const GroupElement& h) const;
  GroupElement negate(const GroupElement& g) const;
  GroupElement subtract(const GroupElement& g, const GroupElement& h) const;
  GroupElement scalar_mul(Integer n, const GroupElement& g) const;
  GroupElement scalar_mul(const mpz_class& n, const GroupElement& g) const;

  // Index-level arithmetic used by the exhaustive searches.
  Integer add_index(Integer a, Integer b) const;
  Integer scalar_mul_index(Integer n, Integer a) const;

  // sum_j y_j x_j / n_j mod 1
  RationalTurn pairing(const GroupElement& y, const GroupElement& x) const;
  // Image of x in the torus T^{D-1}: coordinate at nonzero y is pairing(y, x).
  TorusPoint classical_to_torus(const GroupElement& x) const;
  // The preimage of a torus point under classical_to_torus, if it is classical.
  std::optional<GroupElement> torus_to_classical(const TorusPoint& p) const;

  // "(1,3)"; the trivial group's only element renders "()".
  std::string format(const GroupElement& g) const;
  GroupElement parse_element(std::string_view text) const;
  std::string to_string() const;

  bool operator==(const FiniteAbelianGroup& other) const { return factors_ == other.factors_; }

 private:
  void check(const GroupElement& g) const;

  std::vector<Integer> factors_;
  Integer order_ = 1;
  Integer exponent_ = 1;
};

// A Z-phase for a group of order D: D-1 circle coordinates indexed by the
// nonzero group elements in enumeration order. The coordinate at 0 is fixed to 0.
class TorusPoint {
 public:
  TorusPoint() = default;
  explicit TorusPoint(std::vector<RationalTurn> coords) : coords_(std::move(coords)) {}
  static TorusPoint zero(Integer group_order);

  const std::vector<RationalTurn>& coords() const { return coords_; }
  std::size_t dimension() const { return coords_.size(); }
  // Coordinate at element index y in [0, D); y == 0 yields 0.
  RationalTurn at(Integer y_index) const;

  TorusPoint operator+(const TorusPoint& other) const;
  TorusPoint operator-(const TorusPoint& other) const;
  TorusPoint operator-() const;
  TorusPoint times(Integer n) const;
  TorusPoint times(const mpz_class& n) const;

  bool operator==(const TorusPoint& other) const { return coords_ == other.coords_; }
  auto operator<=>(const TorusPoint& other) const { return coords_ <=> other.coords_; }

  // "1/4 turn" for a single coordinate, "(1/9, 2/9) turn" otherwise.
  std::string to_string() const;

 private:
  std::vector<RationalTurn> coords_;
};

Integer gcd(Integer a, Integer b);
Integer lcm(Integer a, Integer b);
Integer mod_floor(Integer a, Integer n);

}  // namespace ctxf
