#include "ctxf/abgroup.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ctxf/errors.hpp"

namespace ctxf {

namespace {

Rational reduce_mod_one(Rational v) {
  v.canonicalize();
  mpz_class floor_part;
  mpz_fdiv_q(floor_part.get_mpz_t(), v.get_num_mpz_t(), v.get_den_mpz_t());
  Rational r = v - Rational(floor_part);
  r.canonicalize();
  return r;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

Integer parse_integer(std::string_view text) {
  std::string t = trim(text);
  if (t.empty()) throw ParseError("expected an integer, got empty text");
  std::size_t pos = 0;
  Integer value = 0;
  try {
    value = std::stoll(t, &pos);
  } catch (const std::exception&) {
    throw ParseError("expected an integer, got '" + t + "'");
  }
  if (pos != t.size()) throw ParseError("expected an integer, got '" + t + "'");
  return value;
}

}  // namespace

Integer gcd(Integer a, Integer b) {
  a = a < 0 ? -a : a;
  b = b < 0 ? -b : b;
  while (b != 0) {
    Integer t = a % b;
    a = b;
    b = t;
  }
  return a;
}

Integer lcm(Integer a, Integer b) {
  if (a == 0 || b == 0) return 0;
  return (a / gcd(a, b)) * b;
}

Integer mod_floor(Integer a, Integer n) {
  Integer r = a % n;
  return r < 0 ? r + n : r;
}

// ---------------------------------------------------------------- RationalTurn

RationalTurn::RationalTurn(const Rational& value) : value_(reduce_mod_one(value)) {}

RationalTurn::RationalTurn(Integer numerator, Integer denominator) {
  if (denominator == 0) throw StructuralError("turn with zero denominator");
  value_ = reduce_mod_one(Rational(mpz_class(static_cast<long>(numerator)),
                                   mpz_class(static_cast<long>(denominator))));
}

RationalTurn RationalTurn::operator+(const RationalTurn& other) const {
  return RationalTurn(value_ + other.value_);
}

RationalTurn RationalTurn::operator-(const RationalTurn& other) const {
  return RationalTurn(value_ - other.value_);
}

RationalTurn RationalTurn::operator-() const { return RationalTurn(-value_); }

RationalTurn RationalTurn::times(const mpz_class& n) const { return RationalTurn(value_ * n); }

RationalTurn RationalTurn::times(Integer n) const {
  return times(mpz_class(static_cast<long>(n)));
}

std::strong_ordering RationalTurn::operator<=>(const RationalTurn& other) const {
  int c = cmp(value_, other.value_);
  if (c < 0) return std::strong_ordering::less;
  if (c > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::complex<double> RationalTurn::phase() const {
  // Reduce to a double only at the last moment.
  const double angle = 2.0 * std::numbers::pi * value_.get_d();
  return {std::cos(angle), std::sin(angle)};
}

std::string RationalTurn::to_string() const { return value_.get_str(); }

RationalTurn RationalTurn::parse(std::string_view text) {
  std::string t = trim(text);
  if (t.size() >= 4 && t.substr(t.size() - 4) == "turn") t = trim(t.substr(0, t.size() - 4));
  if (t.rfind("turn", 0) == 0) t = trim(t.substr(4));
  if (t.empty()) throw ParseError("empty turn literal");
  auto slash = t.find('/');
  if (slash == std::string::npos) return RationalTurn(parse_integer(t), 1);
  Integer num = parse_integer(t.substr(0, slash));
  Integer den = parse_integer(t.substr(slash + 1));
  if (den <= 0) throw ParseError("turn denominator must be positive in '" + t + "'");
  return RationalTurn(num, den);
}

// ----------------------------------------------------------- FiniteAbelianGroup

FiniteAbelianGroup::FiniteAbelianGroup(std::vector<Integer> invariant_factors)
    : factors_(std::move(invariant_factors)) {
  order_ = 1;
  exponent_ = 1;
  for (Integer n : factors_) {
    if (n < 2) throw StructuralError("invariant factor " + std::to_string(n) + " is below 2");
    if (order_ > (Integer{1} << 40) / n) throw StructuralError("group order too large");
    order_ *= n;
    exponent_ = lcm(exponent_, n);
  }
}

FiniteAbelianGroup FiniteAbelianGroup::cyclic(Integer n) {
  if (n == 1) return FiniteAbelianGroup();
  return FiniteAbelianGroup({n});
}

FiniteAbelianGroup FiniteAbelianGroup::parse(std::string_view literal) {
  std::string t = trim(literal);
  if (t.empty()) throw ParseError("empty group literal");
  std::vector<Integer> factors;
  std::size_t pos = 0;
  while (pos <= t.size()) {
    std::size_t next = pos;
    while (next < t.size() && t[next] != 'x' && t[next] != 'X') ++next;
    std::string part = trim(std::string_view(t).substr(pos, next - pos));
    if (part.size() < 2 || (part[0] != 'Z' && part[0] != 'z')) {
      throw ParseError("bad group literal '" + t + "': expected factors like Z2xZ4");
    }
    Integer n = 0;
    try {
      n = parse_integer(part.substr(1));
    } catch (const ParseError&) {
      throw ParseError("bad group literal '" + t + "': factor '" + part + "'");
    }
    if (n < 1) throw ParseError("bad group literal '" + t + "': factor order must be >= 1");
    if (n > 1) factors.push_back(n);
    if (next == t.size()) break;
    pos = next + 1;
  }
  try {
    return FiniteAbelianGroup(std::move(factors));
  } catch (const StructuralError& e) {
    throw ParseError(std::string("bad group literal '") + t + "': " + e.what());
  }
}

bool FiniteAbelianGroup::contains(const GroupElement& g) const {
  if (g.rank() != factors_.size()) return false;
  for (std::size_t j = 0; j < factors_.size(); ++j) {
    Integer r = g.residues()[j];
    if (r < 0 || r >= factors_[j]) return false;
  }
  return true;
}

void FiniteAbelianGroup::check(const GroupElement& g) const {
  if (g.rank() != factors_.size()) {
    throw StructuralError("element has " + std::to_string(g.rank()) + " residues, group " +
                          to_string() + " has " + std::to_string(factors_.size()) + " factors");
  }
  if (!contains(g)) throw StructuralError("element residues out of range for " + to_string());
}

GroupElement FiniteAbelianGroup::zero() const {
  return GroupElement(std::vector<Integer>(factors_.size(), 0));
}

GroupElement FiniteAbelianGroup::element(Integer index) const {
  if (index < 0 || index >= order_) throw StructuralError("element index out of range");
  std::vector<Integer> r(factors_.size());
  for (std::size_t j = factors_.size(); j-- > 0;) {
    r[j] = index % factors_[j];
    index /= factors_[j];
  }
  return GroupElement(std::move(r));
}

Integer FiniteAbelianGroup::index_of(const GroupElement& g) const {
  check(g);
  Integer index = 0;
  for (std::size_t j = 0; j < factors_.size(); ++j) index = index * factors_[j] + g.residues()[j];
  return index;
}

std::vector<GroupElement> FiniteAbelianGroup::elements() const {
  std::vector<GroupElement> out;
  out.reserve(static_cast<std::size_t>(order_));
  for (Integer i = 0; i < order_; ++i) out.push_back(element(i));
  return out;
}

GroupElement FiniteAbelianGroup::make(std::vector<Integer> residues) const {
  if (residues.size() != factors_.size()) {
    throw StructuralError("element has " + std::to_string(residues.size()) +
                          " residues, group " + to_string() + " has " +
                          std::to_string(factors_.size()) + " factors");
  }
  for (std::size_t j = 0; j < factors_.size(); ++j) residues[j] = mod_floor(residues[j], factors_[j]);
  return GroupElement(std::move(residues));
}

GroupElement FiniteAbelianGroup::add(const GroupElement& g, const GroupElement& h) const {
  check(g);
  check(h);
  std::vector<Integer> r(factors_.size());
  for (std::size_t j = 0; j < factors_.size(); ++j) {
    r[j] = (g.residues()[j] + h.residues()[j]) % factors_[j];
  }
  return GroupElement(std::move(r));
}

GroupElement FiniteAbelianGroup::negate(const GroupElement& g) const {
  check(g);
  std::vector<Integer> r(factors_.size());
  for (std::size_t j = 0; j < factors_.size(); ++j) {
    r[j] = mod_floor(-g.residues()[j], factors_[j]);
  }
  return GroupElement(std::move(r));
}

GroupElement FiniteAbelianGroup::subtract(const GroupElement& g, const GroupElement& h) const {
  return add(g, negate(h));
}

GroupElement FiniteAbelianGroup::scalar_mul(Integer n, const GroupElement& g) const {
  check(g);
  std::vector<Integer> r(factors_.size());
  for (std::size_t j = 0; j < factors_.size(); ++j) {
    Integer nj = mod_floor(n, factors_[j]);
    r[j] = static_cast<Integer>((static_cast<__int128>(nj) * g.residues()[j]) % factors_[j]);
  }
  return GroupElement(std::move(r));
}

GroupElement FiniteAbelianGroup::scalar_mul(const mpz_class& n, const GroupElement& g) const {
  mpz_class e(static_cast<long>(exponent_));
  mpz_class reduced;
  mpz_fdiv_r(reduced.get_mpz_t(), n.get_mpz_t(), e.get_mpz_t());
  return scalar_mul(static_cast<Integer>(reduced.get_si()), g);
}

Integer FiniteAbelianGroup::add_index(Integer a, Integer b) const {
  // Mixed-radix addition without materialising elements.
  Integer result = 0, place = 1;
  for (std::size_t j = factors_.size(); j-- > 0;) {
    Integer n = factors_[j];
    Integer digit = (a % n + b % n) % n;
    result += digit * place;
    place *= n;
    a /= n;
    b /= n;
  }
  return result;
}

Integer FiniteAbelianGroup::scalar_mul_index(Integer n, Integer a) const {
  Integer result = 0, place = 1;
  for (std::size_t j = factors_.size(); j-- > 0;) {
    Integer f = factors_[j];
    Integer digit = static_cast<Integer>((static_cast<__int128>(mod_floor(n, f)) * (a % f)) % f);
    result += digit * place;
    place *= f;
    a /= f;
  }
  return result;
}

RationalTurn FiniteAbelianGroup::pairing(const GroupElement& y, const GroupElement& x) const {
  check(y);
  check(x);
  Rational sum(0);
  for (std::size_t j = 0; j < factors_.size(); ++j) {
    sum += Rational(mpz_class(static_cast<long>(y.residues()[j] * x.residues()[j])),
                    mpz_class(static_cast<long>(factors_[j])));
  }
  return RationalTurn(sum);
}

TorusPoint FiniteAbelianGroup::classical_to_torus(const GroupElement& x) const {
  check(x);
  std::vector<RationalTurn> coords;
  coords.reserve(static_cast<std::size_t>(order_ - 1));
  for (Integer y = 1; y < order_; ++y) coords.push_back(pairing(element(y), x));
  return TorusPoint(std::move(coords));
}

std::optional<GroupElement> FiniteAbelianGroup::torus_to_classical(const TorusPoint& p) const {
  if (p.dimension() != static_cast<std::size_t>(order_ - 1)) {
    throw StructuralError("torus point dimension does not match group order");
  }
  // The coordinate at the j-th unit vector determines residue j.
  std::vector<Integer> residues(factors_.size());
  for (std::size_t j = 0; j < factors_.size(); ++j) {
    std::vector<Integer> unit(factors_.size(), 0);
    unit[j] = 1;
    RationalTurn t = p.at(index_of(GroupElement(unit)));
    Rational scaled = t.value() * Rational(mpz_class(static_cast<long>(factors_[j])));
    scaled.canonicalize();
    if (scaled.get_den() != 1) return std::nullopt;
    residues[j] = scaled.get_num().get_si();
  }
  GroupElement x(std::move(residues));
  if (classical_to_torus(x) != p) return std::nullopt;
  return x;
}

std::string FiniteAbelianGroup::format(const GroupElement& g) const {
  check(g);
  std::ostringstream out;
  out << '(';
  for (std::size_t j = 0; j < g.rank(); ++j) {
    if (j) out << ',';
    out << g.residues()[j];
  }
  out << ')';
  return out.str();
}

GroupElement FiniteAbelianGroup::parse_element(std::string_view text) const {
  std::string t = trim(text);
  if (t.size() < 2 || t.front() != '(' || t.back() != ')') {
    throw ParseError("bad element literal '" + t + "': expected a tuple like (1,3)");
  }
  std::string inner = trim(std::string_view(t).substr(1, t.size() - 2));
  std::vector<Integer> residues;
  if (!inner.empty()) {
    std::size_t pos = 0;
    while (true) {
      std::size_t comma = inner.find(',', pos);
      residues.push_back(parse_integer(std::string_view(inner).substr(pos, comma - pos)));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }
  if (residues.size() != factors_.size()) {
    throw ParseError("element '" + t + "' has " + std::to_string(residues.size()) +
                     " residues but " + to_string() + " has " + std::to_string(factors_.size()) +
                     " factors");
  }
  return make(std::move(residues));
}

std::string FiniteAbelianGroup::to_string() const {
  if (factors_.empty()) return "Z1";
  std::string out;
  for (std::size_t j = 0; j < factors_.size(); ++j) {
    if (j) out += 'x';
    out += 'Z' + std::to_string(factors_[j]);
  }
  return out;
}

// ------------------------------------------------------------------ TorusPoint

TorusPoint TorusPoint::zero(Integer group_order) {
  return TorusPoint(std::vector<RationalTurn>(static_cast<std::size_t>(group_order - 1)));
}

RationalTurn TorusPoint::at(Integer y_index) const {
  if (y_index == 0) return RationalTurn();
  if (y_index < 0 || static_cast<std::size_t>(y_index) > coords_.size()) {
    throw StructuralError("torus coordinate index out of range");
  }
  return coords_[static_cast<std::size_t>(y_index - 1)];
}

TorusPoint TorusPoint::operator+(const TorusPoint& other) const {
  if (other.dimension() != dimension()) throw StructuralError("torus dimension mismatch");
  std::vector<RationalTurn> c(coords_.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = coords_[i] + other.coords_[i];
  return TorusPoint(std::move(c));
}

TorusPoint TorusPoint::operator-(const TorusPoint& other) const { return *this + (-other); }

TorusPoint TorusPoint::operator-() const {
  std::vector<RationalTurn> c(coords_.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = -coords_[i];
  return TorusPoint(std::move(c));
}

TorusPoint TorusPoint::times(const mpz_class& n) const {
  std::vector<RationalTurn> c(coords_.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = coords_[i].times(n);
  return TorusPoint(std::move(c));
}

TorusPoint TorusPoint::times(Integer n) const { return times(mpz_class(static_cast<long>(n))); }

std::string TorusPoint::to_string() const {
  if (coords_.size() == 1) return coords_[0].to_string() + " turn";
  std::string out = "(";
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    if (i) out += ", ";
    out += coords_[i].to_string();
  }
  return out + ") turn";
}

}  // namespace ctxf
