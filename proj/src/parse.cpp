#include "ctxf/parse.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ctxf/errors.hpp"

namespace ctxf {

namespace {

using Json = nlohmann::ordered_json;

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool is_identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  return true;
}

Integer parse_coefficient(const std::string& text, const std::string& context) {
  if (text.empty() || text.size() > 18) throw ParseError("bad coefficient in '" + context + "'");
  for (char c : text) {
    if (!std::isdigit(static_cast<unsigned char>(c))) throw ParseError("bad coefficient '" + text + "' in '" + context + "'");
  }
  return std::stoll(text);
}

std::vector<std::pair<std::string, Integer>> parse_lhs(const std::string& lhs, const std::string& full) {
  std::vector<std::pair<std::string, Integer>> terms;
  std::size_t pos = 0;
  bool first = true;
  while (true) {
    while (pos < lhs.size() && std::isspace(static_cast<unsigned char>(lhs[pos]))) ++pos;
    if (pos == lhs.size()) break;
    Integer sign = 1;
    if (lhs[pos] == '+' || lhs[pos] == '-') {
      sign = lhs[pos] == '-' ? -1 : 1;
      ++pos;
    } else if (!first) {
      throw ParseError("expected '+' or '-' between terms in '" + full + "'");
    }
    std::size_t end = pos;
    while (end < lhs.size() && lhs[end] != '+' && lhs[end] != '-') ++end;
    std::string term = trim(std::string_view(lhs).substr(pos, end - pos));
    pos = end;
    if (term.empty()) throw ParseError("empty term in '" + full + "'");
    Integer coeff = 1;
    std::string name;
    auto star = term.find('*');
    if (star != std::string::npos) {
      coeff = parse_coefficient(trim(std::string_view(term).substr(0, star)), full);
      name = trim(std::string_view(term).substr(star + 1));
    } else {
      std::size_t digits = 0;
      while (digits < term.size() && std::isdigit(static_cast<unsigned char>(term[digits]))) ++digits;
      if (digits > 0) coeff = parse_coefficient(term.substr(0, digits), full);
      name = trim(std::string_view(term).substr(digits));
    }
    if (!is_identifier(name)) throw ParseError("bad variable name '" + name + "' in '" + full + "'");
    terms.emplace_back(name, sign * coeff);
    first = false;
  }
  if (terms.empty()) throw ParseError("equation '" + full + "' has no variables");
  return terms;
}

EquationRhs parse_rhs(const std::string& rhs, const std::optional<FiniteAbelianGroup>& group,
                      const std::string& full) {
  if (rhs.empty()) throw ParseError("missing right-hand side in '" + full + "'");
  if (rhs.find("turn") != std::string::npos) return RationalTurn::parse(rhs);
  if (!group) throw ParseError("group-valued right-hand side '" + rhs + "' needs a group");
  if (rhs.front() == '(') return group->parse_element(rhs);
  if (group->rank() == 1) return group->parse_element("(" + rhs + ")");
  throw ParseError("right-hand side '" + rhs + "' must be a tuple like (1,0)");
}

ZModEquation equation_from_json(const Json& j, const FiniteAbelianGroup& group) {
  if (j.is_string()) return parse_equation(j.get<std::string>(), group);
  if (!j.is_object() || !j.contains("coeffs") || !j.contains("rhs")) {
    throw ParseError("an equation needs \"coeffs\" and \"rhs\"");
  }
  const Json& coeffs = j.at("coeffs");
  if (!coeffs.is_object() || coeffs.empty()) throw ParseError("\"coeffs\" must be a non-empty object");
  std::vector<std::pair<std::string, Integer>> terms;
  for (auto it = coeffs.begin(); it != coeffs.end(); ++it) {
    if (!is_identifier(it.key())) throw ParseError("bad variable name '" + it.key() + "'");
    if (!it.value().is_number_integer()) throw ParseError("coefficient of " + it.key() + " must be an integer");
    terms.emplace_back(it.key(), it.value().get<Integer>());
  }
  const Json& rhs = j.at("rhs");
  std::string rhs_text;
  if (rhs.is_string()) {
    rhs_text = rhs.get<std::string>();
  } else if (rhs.is_number_integer()) {
    rhs_text = std::to_string(rhs.get<Integer>());
  } else {
    throw ParseError("\"rhs\" must be a string or integer");
  }
  auto value = parse_rhs(trim(rhs_text), group, rhs_text);
  if (std::holds_alternative<RationalTurn>(value)) {
    throw ParseError("scenario equations need a group-valued right-hand side");
  }
  return ZModEquation(std::move(terms), std::move(value));
}

}  // namespace

ZModEquation parse_equation(std::string_view text, const std::optional<FiniteAbelianGroup>& group) {
  const std::string full(text);
  auto eq = full.find('=');
  if (eq == std::string::npos || full.find('=', eq + 1) != std::string::npos) {
    throw ParseError("equation '" + full + "' needs exactly one '='");
  }
  auto terms = parse_lhs(full.substr(0, eq), full);
  auto rhs = parse_rhs(trim(std::string_view(full).substr(eq + 1)), group, full);
  return ZModEquation(std::move(terms), std::move(rhs));
}

ScenarioSpec parse_spec_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("spec is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("group") || !j.at("group").is_string()) {
    throw ParseError("spec needs a \"group\" string");
  }
  const bool single = j.contains("equation");
  const bool many = j.contains("equations");
  if (single == many) throw ParseError("spec needs exactly one of \"equation\" or \"equations\"");
  ScenarioSpec spec{FiniteAbelianGroup::parse(j.at("group").get<std::string>()), {}};
  try {
    if (single) {
      spec.equations.push_back(equation_from_json(j.at("equation"), spec.group));
    } else {
      const Json& list = j.at("equations");
      if (!list.is_array() || list.empty()) throw ParseError("\"equations\" must be a non-empty array");
      for (const auto& e : list) spec.equations.push_back(equation_from_json(e, spec.group));
    }
  } catch (const StructuralError& e) {
    throw ParseError(e.what());
  }
  return spec;
}

ScenarioSpec load_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read spec file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_spec_json(buffer.str());
}

std::vector<TorusPoint> parse_phase_list(std::string_view text, const FiniteAbelianGroup& group) {
  std::vector<TorusPoint> out;
  const std::string all(text);
  std::size_t pos = 0;
  while (true) {
    std::size_t semi = all.find(';', pos);
    std::string party = trim(std::string_view(all).substr(pos, semi == std::string::npos ? std::string::npos : semi - pos));
    std::vector<RationalTurn> coords;
    std::size_t cpos = 0;
    while (true) {
      std::size_t comma = party.find(',', cpos);
      coords.push_back(RationalTurn::parse(
          std::string_view(party).substr(cpos, comma == std::string::npos ? std::string::npos : comma - cpos)));
      if (comma == std::string::npos) break;
      cpos = comma + 1;
    }
    if (static_cast<Integer>(coords.size()) != group.order() - 1) {
      throw ParseError("phase '" + party + "' needs " + std::to_string(group.order() - 1) + " coordinates for " +
                       group.to_string());
    }
    out.emplace_back(std::move(coords));
    if (semi == std::string::npos) break;
    pos = semi + 1;
  }
  return out;
}

}  // namespace ctxf
