#include "ctxf/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <iomanip>
#include <optional>
#include <sstream>

#include "ctxf/avn.hpp"
#include "ctxf/errors.hpp"
#include "ctxf/parse.hpp"
#include "ctxf/qrealize.hpp"
#include "ctxf/sheaf.hpp"
#include "ctxf/zsolve.hpp"

namespace ctxf::cli {

namespace {

// Raised for contexts whose phases do not sum to a classical point.
class Unrealizable : public Error {
 public:
  using Error::Error;
};

struct InputOptions {
  std::string spec_path;
  std::string group;
  std::vector<std::string> equations;
};

void add_input_options(CLI::App* cmd, InputOptions& in) {
  cmd->add_option("--spec", in.spec_path, "Scenario spec file (JSON)");
  cmd->add_option("--group", in.group, "Outcome group, e.g. Z2 or Z2xZ4");
  cmd->add_option("--eqn", in.equations, "Equation such as \"2*y=(1)\"; repeatable");
}

std::optional<FiniteAbelianGroup> input_group(const InputOptions& in) {
  if (!in.spec_path.empty()) return load_spec_file(in.spec_path).group;
  if (in.group.empty()) return std::nullopt;
  return FiniteAbelianGroup::parse(in.group);
}

ScenarioSpec load_input(const InputOptions& in) {
  if (!in.spec_path.empty()) {
    if (!in.group.empty() || !in.equations.empty()) {
      throw ParseError("--spec cannot be combined with --group or --eqn");
    }
    return load_spec_file(in.spec_path);
  }
  if (in.group.empty()) throw ParseError("either --spec or --group with --eqn is required");
  if (in.equations.empty()) throw ParseError("at least one --eqn is required");
  ScenarioSpec spec{FiniteAbelianGroup::parse(in.group), {}};
  for (const auto& e : in.equations) {
    auto eq = parse_equation(e, spec.group);
    if (eq.is_circle_valued()) throw ParseError("equation '" + e + "' is circle-valued; scenarios need a group value");
    spec.equations.push_back(std::move(eq));
  }
  return spec;
}

std::vector<MerminScenario> build_all(const ScenarioSpec& spec) {
  if (spec.equations.size() == 1) return {build_scenario(spec.group, spec.equations.front())};
  return build_system_scenario(spec.system()).factors;
}

std::string join_labels(const MeasurementScenario& m, const Domain& d, const std::string& sep) {
  std::string out;
  for (std::size_t k = 0; k < d.size(); ++k) out += (k ? sep : "") + m.measurements()[d[k]];
  return out;
}

std::string format_vars(const std::vector<std::string>& names, const std::vector<std::string>& values,
                        const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) out += (i ? ", " : "") + names[i] + sep + values[i];
  return out;
}

std::string format_double(double v) {
  std::ostringstream s;
  s << std::setprecision(3) << std::scientific << v;
  return s.str();
}

// ---------------------------------------------------------------- subcommands

int cmd_solve(const InputOptions& in, std::ostream& out) {
  std::optional<FiniteAbelianGroup> group;
  std::vector<ZModEquation> eqs;
  if (!in.spec_path.empty()) {
    ScenarioSpec spec = load_input(in);
    group = spec.group;
    eqs = spec.equations;
  } else {
    if (in.equations.empty()) throw ParseError("at least one --eqn is required");
    if (!in.group.empty()) group = FiniteAbelianGroup::parse(in.group);
    for (const auto& e : in.equations) eqs.push_back(parse_equation(e, group));
  }
  const bool circle = std::all_of(eqs.begin(), eqs.end(), [](const auto& e) { return e.is_circle_valued(); });
  const bool grouped = std::none_of(eqs.begin(), eqs.end(), [](const auto& e) { return e.is_circle_valued(); });
  if (!circle && !grouped) throw ParseError("cannot mix circle-valued and group-valued equations");

  if (circle) {
    auto solved = gaussian_eliminate_circle(EquationSystem::over_circle(eqs));
    if (!solved) {
      out << "inconsistent; no solution in the circle\n";
      return kOk;
    }
    std::vector<std::string> sets, least;
    for (std::size_t r = 0; r < solved->variables.size(); ++r) {
      std::string s = "{";
      for (std::size_t i = 0; i < solved->candidates[r].size(); ++i) {
        s += (i ? ", " : "") + solved->candidates[r][i].to_string();
      }
      sets.push_back(s + "} turn");
      least.push_back(solved->least()[r].to_string() + " turn");
    }
    out << "consistent; " << format_vars(solved->variables, sets, " in ") << "; least solution "
        << format_vars(solved->variables, least, " = ") << "\n";
    return kOk;
  }

  const EquationSystem sys = EquationSystem::over_group(eqs, *group);
  if (auto relation = find_violated_relation(sys)) {
    out << "inconsistent; violated relation " << format_relation(*relation) << "\n";
    return kOk;
  }
  out << "consistent; ";
  if (auto k_solution = solve_in_group(sys)) {
    std::vector<std::string> values;
    for (const auto& v : sys.variables()) values.push_back(group->format(k_solution->at(v)));
    out << "solution " << format_vars(sys.variables(), values, "=");
  } else {
    out << "no solution in " << group->to_string();
  }
  const TorusAssignment torus = solve_torus(sys);
  std::vector<std::string> values;
  for (const auto& v : sys.variables()) values.push_back(torus.at(v).to_string());
  out << "; torus solution " << format_vars(sys.variables(), values, " = ") << "\n";
  return kOk;
}

void print_scenario(const MerminScenario& s, std::ostream& out) {
  out << "group " << s.group.to_string() << "\n";
  out << "equation " << s.equation.to_string(s.group) << "\n";
  out << "exponent k = " << s.exponent << "\n";
  out << "parties N = " << s.parties << "\n";
  out << "padding n0 = " << s.padding << "\n";
  for (std::size_t r = 0; r < s.variables.size(); ++r) {
    out << "beta " << r + 1 << " (" << (s.signs[r] < 0 ? "-" : "") << s.variables[r]
        << ", coefficient " << s.coefficients[r] << ") = " << s.beta[r + 1].to_string() << "\n";
  }
  out << "R =";
  for (auto r : s.phase_index) out << " " << r;
  out << "\n";
  for (std::size_t i = 0; i < s.parties; ++i) {
    out << "alpha " << i + 1 << " = " << s.alphas[i].to_string() << "\n";
  }
  out << "cover:\n";
  for (std::size_t c = 0; c < s.measurement.cover().size(); ++c) {
    const auto& ctx = s.measurement.cover()[c];
    out << "  " << ctx.name << ": " << join_labels(s.measurement, ctx.measurements, " ") << " sum "
        << s.group.format(s.context_targets[c]) << "\n";
  }
}

int cmd_scenario_build(const InputOptions& in, std::ostream& out) {
  const auto scenarios = build_all(load_input(in));
  for (std::size_t f = 0; f < scenarios.size(); ++f) {
    if (scenarios.size() > 1) out << (f ? "\n" : "") << "# scenario " << f + 1 << "\n";
    print_scenario(scenarios[f], out);
  }
  return kOk;
}

int cmd_table(const InputOptions& in, const std::string& format, bool possibilistic, std::ostream& out) {
  TableFormat fmt;
  if (format == "tsv") {
    fmt = TableFormat::Tsv;
  } else if (format == "markdown") {
    fmt = TableFormat::Markdown;
  } else {
    throw ParseError("unknown table format '" + format + "'");
  }
  const auto scenarios = build_all(load_input(in));
  for (std::size_t f = 0; f < scenarios.size(); ++f) {
    if (scenarios.size() > 1) {
      out << (f ? "\n" : "") << "# " << scenarios[f].equation.to_string(scenarios[f].group) << "\n";
    }
    out << render_table(scenarios[f], fmt, possibilistic);
  }
  return kOk;
}

ProbabilisticModel model_for(const ScenarioSpec& spec) {
  if (spec.equations.size() == 1) return empirical_model(build_scenario(spec.group, spec.equations.front()));
  return composite_empirical_model(build_system_scenario(spec.system()));
}

int cmd_classify(const InputOptions& in, std::ostream& out) {
  out << to_string(classify(model_for(load_input(in)))) << "\n";
  return kOk;
}

int cmd_avn(const InputOptions& in, std::optional<Integer> modulus, const std::string& module,
            std::ostream& out) {
  const ScenarioSpec spec = load_input(in);
  const ProbabilisticModel model = model_for(spec);
  const Integer q = modulus ? *modulus : spec.group.exponent();
  const FiniteAbelianGroup g = module.empty() ? spec.group : FiniteAbelianGroup::parse(module);
  const AvnResult r = avn_check(possibilize(model), q, g);
  out << "AvN over Z_" << q << " with module " << g.to_string() << ": " << (r.avn ? "true" : "false") << " ("
      << r.theory.equations.size() << " equations)\n";
  if (r.witness) {
    MeasurementScenario valued(model.scenario().measurements(), g, model.scenario().cover());
    out << "satisfying global assignment: " << format_section(valued, *r.witness) << "\n";
  }
  return kOk;
}

int report_lemmas(const FiniteAbelianGroup& g, const std::vector<TorusPoint>& alphas, double tolerance,
                  std::ostream& out) {
  const auto parity = check_parity_lemma(g, alphas.size(), alphas, tolerance);
  if (parity.status == LemmaCheck::Status::Unrealizable) throw Unrealizable(parity.message);
  const auto decoherence = check_decoherence_lemma(g, alphas.size(), alphas, tolerance);
  out << "parity lemma " << to_string(parity.status) << ": outcome " << g.format(*parity.target)
      << ", total variation " << format_double(parity.deviation) << "\n";
  out << "decoherence lemma " << to_string(decoherence.status) << ": max deviation "
      << format_double(decoherence.deviation) << "\n";
  return parity.holds() && decoherence.holds() ? kOk : kInternal;
}

int cmd_realize(const InputOptions& in, double tolerance, const std::string& phases, std::ostream& out) {
  if (!phases.empty()) {
    auto group = input_group(in);
    if (!group) throw ParseError("--phases needs --group or --spec");
    return report_lemmas(*group, parse_phase_list(phases, *group), tolerance, out);
  }
  const auto scenarios = build_all(load_input(in));
  double worst = 0.0;
  for (std::size_t f = 0; f < scenarios.size(); ++f) {
    const MerminScenario& s = scenarios[f];
    const ProbabilisticModel model = empirical_model(s);
    const auto d = static_cast<std::size_t>(s.group.order());
    if (scenarios.size() > 1) out << "# " << s.equation.to_string(s.group) << "\n";
    for (std::size_t c = 0; c < s.measurement.cover().size(); ++c) {
      const auto alphas = s.context_alphas(c);
      if (check_parity_lemma(s.group, s.parties, alphas, tolerance).status == LemmaCheck::Status::Unrealizable) {
        throw Unrealizable("context " + s.measurement.cover()[c].name + " has a non-classical phase sum");
      }
      const OutcomeDistribution simulated = measure_all_X(gated_ghz(s.group, alphas));
      OutcomeDistribution exact{s.group.order(), s.parties, std::vector<double>(simulated.weights.size(), 0.0)};
      for (const auto& [a, w] : model.at(c).weights()) {
        std::size_t flat = 0;
        for (Integer v : a) flat = flat * d + static_cast<std::size_t>(v);
        exact.weights[flat] = w.get_d();
      }
      const double dev = max_deviation(simulated, exact);
      worst = std::max(worst, dev);
      out << s.measurement.cover()[c].name << ": max deviation " << format_double(dev) << "\n";
    }
  }
  out << "max deviation " << format_double(worst) << " (tolerance " << format_double(tolerance) << ")\n";
  return worst < tolerance ? kOk : kInternal;
}

int cmd_hierarchy_demo(Integer p, const std::string& kprime_literal, std::ostream& out) {
  const FiniteAbelianGroup kprime = FiniteAbelianGroup::parse(kprime_literal);
  const HierarchyWitness w = hierarchy_witness(p, kprime);
  const auto zp = FiniteAbelianGroup::cyclic(p);
  const MerminScenario s = build_scenario(zp, ZModEquation({{"y", p}}, zp.make({1})));
  MeasurementScenario valued(s.measurement.measurements(), kprime, s.measurement.cover());
  out << "equation " << s.equation.to_string(zp) << " over " << zp.to_string() << ", K' = " << kprime.to_string()
      << "\n";
  out << "y = " << kprime.format(w.y) << "\n";
  out << "witness: " << format_section(valued, w.assignment) << "\n";
  out << "verified against " << w.lifted.equations.size() << " lifted equations\n";
  out << "not AvN over " << kprime.to_string() << "\n";
  return kOk;
}

}  // namespace

std::string render_table(const MerminScenario& s, TableFormat format, bool possibilistic) {
  const FiniteAbelianGroup& k = s.group;
  const ProbabilisticModel model = empirical_model(s);
  const Integer zero = 0;
  const Integer a = k.index_of(s.target);
  // Fiber classes: sum = 0, sum = a (if a != 0), everything else (if any).
  std::vector<std::string> headers{"sum=" + k.format(k.zero())};
  if (a != zero) headers.push_back("sum=" + k.format(s.target));
  const std::size_t classes_used = a != zero ? 2 : 1;
  const bool has_other = k.order() > static_cast<Integer>(classes_used);
  if (has_other) headers.push_back("other");
  auto class_of = [&](Integer sum) -> std::size_t {
    if (sum == zero) return 0;
    if (a != zero && sum == a) return 1;
    return classes_used;
  };

  std::vector<std::vector<std::string>> rows;
  const auto d = static_cast<std::size_t>(k.order());
  for (std::size_t c = 0; c < s.measurement.cover().size(); ++c) {
    const auto& ctx = s.measurement.cover()[c];
    std::vector<std::optional<mpq_class>> cell(headers.size());
    std::vector<bool> mixed(headers.size(), false);
    std::size_t total = 1;
    for (std::size_t i = 0; i < ctx.measurements.size(); ++i) total *= d;
    Assignment tuple(ctx.measurements.size(), 0);
    for (std::size_t flat = 0; flat < total; ++flat) {
      std::size_t rest = flat;
      Integer sum = 0;
      for (std::size_t i = tuple.size(); i-- > 0;) {
        tuple[i] = static_cast<Integer>(rest % d);
        rest /= d;
        sum = k.add_index(sum, tuple[i]);
      }
      mpq_class w = model.at(c).weight(tuple);
      if (possibilistic) w = sgn(w) != 0 ? 1 : 0;
      const std::size_t cls = class_of(sum);
      if (!cell[cls]) {
        cell[cls] = w;
      } else if (*cell[cls] != w) {
        mixed[cls] = true;
      }
    }
    std::vector<std::string> row{ctx.name, join_labels(s.measurement, ctx.measurements, " ")};
    for (std::size_t h = 0; h < headers.size(); ++h) row.push_back(mixed[h] ? "mixed" : cell[h]->get_str());
    rows.push_back(std::move(row));
  }

  std::ostringstream out;
  std::vector<std::string> header{"context", "measurements"};
  header.insert(header.end(), headers.begin(), headers.end());
  if (format == TableFormat::Tsv) {
    auto emit = [&](const std::vector<std::string>& r) {
      for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "\t" : "") << r[i];
      out << "\n";
    };
    emit(header);
    for (const auto& r : rows) emit(r);
  } else {
    auto emit = [&](const std::vector<std::string>& r) {
      out << "|";
      for (const auto& cell : r) out << " " << cell << " |";
      out << "\n";
    };
    emit(header);
    out << "|";
    for (std::size_t i = 0; i < header.size(); ++i) out << "---|";
    out << "\n";
    for (const auto& r : rows) emit(r);
  }
  return out.str();
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mermin scenarios, contextuality classification and quantum realization", "ctxf"};
  app.require_subcommand(1);

  InputOptions solve_in, build_in, table_in, classify_in, avn_in, realize_in;
  auto* solve = app.add_subcommand("solve", "Consistency, K-solution and torus solution of a system");
  add_input_options(solve, solve_in);

  auto* scenario = app.add_subcommand("scenario", "Scenario commands");
  scenario->require_subcommand(1);
  auto* build = scenario->add_subcommand("build", "Print N, n0, phases and the cover");
  add_input_options(build, build_in);

  auto* table = app.add_subcommand("table", "Empirical model table");
  add_input_options(table, table_in);
  std::string table_format = "tsv";
  bool possibilistic = false;
  table->add_option("--format", table_format, "tsv or markdown");
  table->add_flag("--possibilistic", possibilistic, "Print the 0/1 support table");

  auto* classify_cmd = app.add_subcommand("classify", "Contextuality level of the empirical model");
  add_input_options(classify_cmd, classify_in);

  auto* avn = app.add_subcommand("avn", "All-versus-nothing check");
  add_input_options(avn, avn_in);
  std::optional<Integer> modulus;
  std::string module;
  avn->add_option("--modulus", modulus, "Coefficient ring Z_q (default: exponent of the group)");
  avn->add_option("--module", module, "Module the global assignment takes values in");

  auto* realize = app.add_subcommand("realize", "Compare exact models with simulated GHZ statistics");
  add_input_options(realize, realize_in);
  double tolerance = kRealizeTolerance;
  std::string phases;
  realize->add_option("--tolerance", tolerance, "Per-entry tolerance");
  realize->add_option("--phases", phases, "Check one context, e.g. \"1/4;1/4;0\"");

  auto* demo = app.add_subcommand("hierarchy-demo", "Witness that a Z_p AvN model is not AvN over K'");
  Integer p = 3;
  std::string kprime = "Z2";
  demo->add_option("--p", p, "Prime p");
  demo->add_option("--kprime", kprime, "Group K' with exponent coprime to p");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kSpecError;
  }

  try {
    if (*solve) return cmd_solve(solve_in, out);
    if (*build) return cmd_scenario_build(build_in, out);
    if (*table) return cmd_table(table_in, table_format, possibilistic, out);
    if (*classify_cmd) return cmd_classify(classify_in, out);
    if (*avn) return cmd_avn(avn_in, modulus, module, out);
    if (*realize) return cmd_realize(realize_in, tolerance, phases, out);
    if (*demo) return cmd_hierarchy_demo(p, kprime, out);
  } catch (const Unrealizable& e) {
    err << "unrealizable: " << e.what()
        << " (the phases of a context must sum to an X-classical point)\n";
    return kUnrealizable;
  } catch (const InvariantViolation& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kSpecError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}

}  // namespace ctxf::cli
