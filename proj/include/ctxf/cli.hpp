#pragma once

#include <ostream>
#include <string>

#include "ctxf/mermin.hpp"

namespace ctxf::cli {

enum ExitCode : int {
  kOk = 0,
  kSpecError = 2,
  kUnrealizable = 3,
  kInternal = 4,
};

enum class TableFormat { Tsv, Markdown };

// One row per context, one column per outcome-fiber class (sum = 0, sum = a,
// anything else). Each cell holds the per-section weight shared by the class.
std::string render_table(const MerminScenario& s, TableFormat format, bool possibilistic);

// Entry point behind the ctxf executable; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ctxf::cli
