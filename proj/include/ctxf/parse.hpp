#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ctxf/abgroup.hpp"
#include "ctxf/zsolve.hpp"

namespace ctxf {

// "2*y1 + 3*y2 = (1,0)", "-y = (2)", "2*y = turn 1/2", "3y = 1/3 turn".
// A group-valued rhs needs a group; a bare integer is accepted for cyclic
// groups. ParseError on malformed text.
ZModEquation parse_equation(std::string_view text, const std::optional<FiniteAbelianGroup>& group);

struct ScenarioSpec {
  FiniteAbelianGroup group;
  std::vector<ZModEquation> equations;

  EquationSystem system() const { return EquationSystem::over_group(equations, group); }
};

// {"group": "Z3", "equation": {"coeffs": {"y": 3}, "rhs": "(1)"}}, or an
// "equations" array. An equation may also be given as a text string.
ScenarioSpec parse_spec_json(const std::string& text);
ScenarioSpec load_spec_file(const std::string& path);

// "1/4;1/4;0": one torus point per party, coordinates separated by commas.
std::vector<TorusPoint> parse_phase_list(std::string_view text, const FiniteAbelianGroup& group);

}  // namespace ctxf
