#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "ctxf/cli.hpp"
#include "ctxf/errors.hpp"
#include "ctxf/parse.hpp"

using namespace ctxf;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "ctxf");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string write_temp(const std::string& name, const std::string& text) {
  const std::string path = ::testing::TempDir() + name;
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST(Cli, SolveUnsolvable) {
  auto r = run_cli({"solve", "--group", "Z2", "--eqn", "2*y=(1)"});
  EXPECT_EQ(r.code, cli::kOk);
  EXPECT_EQ(r.out, "consistent; no solution in Z2; torus solution y = 1/4 turn\n");
}

TEST(Cli, SolveSolvable) {
  auto r = run_cli({"solve", "--group", "Z2", "--eqn", "2*y=(0)"});
  EXPECT_EQ(r.code, cli::kOk);
  EXPECT_NE(r.out.find("solution y=(0)"), std::string::npos);
}

TEST(Cli, SolveInconsistent) {
  auto r = run_cli({"solve", "--group", "Z2", "--eqn", "y=(0)", "--eqn", "y=(1)"});
  EXPECT_EQ(r.code, cli::kOk);
  EXPECT_EQ(r.out.rfind("inconsistent", 0), 0u);
}

TEST(Cli, MalformedInputExitsTwo) {
  EXPECT_EQ(run_cli({"solve", "--group", "Z2", "--eqn", "2*y=="}).code, cli::kSpecError);
  EXPECT_EQ(run_cli({"solve", "--group", "Q2", "--eqn", "y=(1)"}).code, cli::kSpecError);
  EXPECT_EQ(run_cli({"solve", "--group", "Z2"}).code, cli::kSpecError);
  EXPECT_EQ(run_cli({"table", "--group", "Z2", "--eqn", "2*y=(1)", "--format", "csv"}).code, cli::kSpecError);
  EXPECT_EQ(run_cli({"frobnicate"}).code, cli::kSpecError);
  auto r = run_cli({"solve", "--group", "Z2", "--eqn", "2*y=="});
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, QubitTable) {
  auto r = run_cli({"table", "--group", "Z2", "--eqn", "2*y=(1)"});
  EXPECT_EQ(r.code, cli::kOk);
  EXPECT_EQ(r.out,
            "context\tmeasurements\tsum=(0)\tsum=(1)\n"
            "control\tX1^0 X2^0 X3^0\t1/4\t0\n"
            "var1\tX1^1 X2^1 X3^0\t0\t1/4\n"
            "var2\tX1^1 X2^0 X3^1\t0\t1/4\n"
            "var3\tX1^0 X2^1 X3^1\t0\t1/4\n");
}

TEST(Cli, PossibilisticMarkdownTable) {
  auto r = run_cli({"table", "--group", "Z2", "--eqn", "2*y=(1)", "--possibilistic", "--format", "markdown"});
  EXPECT_EQ(r.code, cli::kOk);
  EXPECT_EQ(r.out,
            "| context | measurements | sum=(0) | sum=(1) |\n"
            "|---|---|---|---|\n"
            "| control | X1^0 X2^0 X3^0 | 1 | 0 |\n"
            "| var1 | X1^1 X2^1 X3^0 | 0 | 1 |\n"
            "| var2 | X1^1 X2^0 X3^1 | 0 | 1 |\n"
            "| var3 | X1^0 X2^1 X3^1 | 0 | 1 |\n");
}

TEST(Cli, Z3Table) {
  auto r = run_cli({"table", "--group", "Z3", "--eqn", "3*y=(1)"});
  EXPECT_EQ(r.code, cli::kOk);
  std::istringstream lines(r.out);
  std::string line;
  int rows = 0;
  std::getline(lines, line);
  EXPECT_EQ(line, "context\tmeasurements\tsum=(0)\tsum=(1)\tother");
  while (std::getline(lines, line)) {
    ++rows;
    EXPECT_NE(line.find("1/27"), std::string::npos);
  }
  EXPECT_EQ(rows, 5);
}

TEST(Cli, SpecFileMatchesFlags) {
  auto path = write_temp("z3.json", R"j({ "group": "Z3", "equation": {"coeffs": {"y": 3}, "rhs": "(1)"} })j");
  auto from_file = run_cli({"table", "--spec", path});
  auto from_flags = run_cli({"table", "--group", "Z3", "--eqn", "3*y=(1)"});
  EXPECT_EQ(from_file.code, cli::kOk);
  EXPECT_EQ(from_file.out, from_flags.out);
  // File and flags together are a conflict, not a silent override.
  EXPECT_EQ(run_cli({"table", "--spec", path, "--group", "Z2"}).code, cli::kSpecError);
  EXPECT_EQ(run_cli({"table", "--spec", ::testing::TempDir() + "missing.json"}).code, cli::kSpecError);
  auto bad = write_temp("bad.json", R"j({ "group": "Z3" })j");
  EXPECT_EQ(run_cli({"table", "--spec", bad}).code, cli::kSpecError);
}

TEST(Cli, SpecParsing) {
  auto spec = parse_spec_json(R"j({"group": "Z2", "equations": ["2*a = (1)", {"coeffs": {"a": 1, "b": 1}, "rhs": 0}]})j");
  EXPECT_EQ(spec.group, FiniteAbelianGroup::cyclic(2));
  ASSERT_EQ(spec.equations.size(), 2u);
  EXPECT_EQ(spec.system().variables(), (std::vector<std::string>{"a", "b"}));
  EXPECT_THROW(parse_spec_json("{"), ParseError);
  EXPECT_THROW(parse_spec_json(R"j({"group": "Z2", "equation": "y = (1)", "equations": []})j"), ParseError);
  EXPECT_THROW(parse_spec_json(R"j({"group": "Z2", "equation": {"coeffs": {"y": 1}, "rhs": "turn 1/2"}})j"),
               ParseError);
}

TEST(Cli, PhaseListParsing) {
  auto z3 = FiniteAbelianGroup::cyclic(3);
  auto phases = parse_phase_list("1/9,2/9; 0,0", z3);
  ASSERT_EQ(phases.size(), 2u);
  EXPECT_EQ(phases[0], TorusPoint({RationalTurn(1, 9), RationalTurn(2, 9)}));
  EXPECT_THROW(parse_phase_list("1/9", z3), ParseError);
}

TEST(Cli, ScenarioBuild) {
  auto r = run_cli({"scenario", "build", "--group", "Z2", "--eqn", "2*y=(1)"});
  EXPECT_EQ(r.code, cli::kOk);
  EXPECT_NE(r.out.find("parties N = 3"), std::string::npos);
  EXPECT_NE(r.out.find("padding n0 = 1"), std::string::npos);
  EXPECT_NE(r.out.find("1/4 turn"), std::string::npos);
  EXPECT_NE(r.out.find("var3: X1^0 X2^1 X3^1"), std::string::npos);
}

TEST(Cli, Classify) {
  EXPECT_EQ(run_cli({"classify", "--group", "Z2", "--eqn", "2*y=(1)"}).out, "StronglyContextual\n");
  EXPECT_EQ(run_cli({"classify", "--group", "Z2", "--eqn", "2*y=(0)"}).out, "NonContextual\n");
}

TEST(Cli, Avn) {
  auto yes = run_cli({"avn", "--group", "Z2", "--eqn", "2*y=(1)"});
  EXPECT_EQ(yes.code, cli::kOk);
  EXPECT_NE(yes.out.find(": true"), std::string::npos);
  auto no = run_cli({"avn", "--group", "Z2", "--eqn", "2*y=(0)"});
  EXPECT_NE(no.out.find(": false"), std::string::npos);
  EXPECT_NE(no.out.find("satisfying global assignment: X1^0=0"), std::string::npos);
  EXPECT_EQ(run_cli({"avn", "--group", "Z2", "--eqn", "2*y=(1)", "--modulus", "3"}).code, cli::kSpecError);
}

TEST(Cli, RealizeWithinTolerance) {
  auto r = run_cli({"realize", "--group", "Z3", "--eqn", "3*y=(1)"});
  EXPECT_EQ(r.code, cli::kOk);
  EXPECT_NE(r.out.find("max deviation"), std::string::npos);
}

TEST(Cli, RealizeUnrealizablePhasesExitThree) {
  auto r = run_cli({"realize", "--group", "Z2", "--eqn", "2*y=(1)", "--phases", "1/4;0;0"});
  EXPECT_EQ(r.code, cli::kUnrealizable);
  EXPECT_NE((r.out + r.err).find("X-classical"), std::string::npos);
  EXPECT_EQ(run_cli({"realize", "--group", "Z2", "--eqn", "2*y=(1)", "--phases", "1/4;1/4;0"}).code, cli::kOk);
}

TEST(Cli, HierarchyDemo) {
  auto r = run_cli({"hierarchy-demo", "--p", "3", "--kprime", "Z2"});
  EXPECT_EQ(r.code, cli::kOk);
  EXPECT_NE(r.out.find("y = (1)"), std::string::npos);
  EXPECT_NE(r.out.find("not AvN over Z2"), std::string::npos);
  EXPECT_EQ(run_cli({"hierarchy-demo", "--p", "3", "--kprime", "Z3"}).code, cli::kSpecError);
}

TEST(Cli, OutputIsDeterministic) {
  for (const auto& cmd : std::vector<std::vector<std::string>>{
           {"table", "--group", "Z3", "--eqn", "3*y=(1)"},
           {"avn", "--group", "Z2", "--eqn", "2*y=(0)"},
           {"scenario", "build", "--group", "Z3", "--eqn", "3*y=(1)"}}) {
    EXPECT_EQ(run_cli(cmd).out, run_cli(cmd).out);
  }
}
