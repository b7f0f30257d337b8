#pragma once

#include <string>
#include <vector>

#include "ctxf/abgroup.hpp"
#include "ctxf/sheaf.hpp"
#include "ctxf/zsolve.hpp"

namespace ctxf {

// One control context and N cyclic variations built from a single equation
// sum_r n_r y_r = a over K and a torus solution beta.
//
// Negative coefficients are absorbed into the variable (n y = (-n)(-y)), so
// the stored coefficients are positive and the stored betas already carry the
// sign. Variables with zero coefficient do not take part.
struct MerminScenario {
  FiniteAbelianGroup group;
  ZModEquation equation;
  std::vector<std::string> variables;     // variable r at index r - 1
  std::vector<Integer> coefficients;      // n_r >= 1
  std::vector<Integer> signs;             // +1 or -1 per variable
  GroupElement target;                    // a
  Integer exponent = 1;                   // k
  std::size_t parties = 0;                // N
  Integer padding = 0;                    // n_0
  std::vector<std::size_t> phase_index;   // R(i) for party i at index i - 1
  std::vector<TorusPoint> beta;           // beta_0 = 0, then beta_1..beta_M
  std::vector<TorusPoint> alphas;         // alpha_i = beta_{R(i)}
  // context_phases[c][i] is the variable index measured by party i in context c
  // (0 is the control phase). Context 0 is the control.
  std::vector<std::vector<std::size_t>> context_phases;
  std::vector<GroupElement> context_targets;
  MeasurementScenario measurement;

  std::size_t variable_count() const { return variables.size(); }
  // Index of X_i^r in measurement order, party and variable 0-based / r in [0, M].
  std::size_t measurement_index(std::size_t party, std::size_t r) const;
  // The phase gate of every party in a context.
  std::vector<TorusPoint> context_alphas(std::size_t context) const;
};

// beta must be a verified torus solution of the equation. Throws
// ConsistencyError on an inconsistent equation, PreconditionError if beta does
// not solve it, DomainError if no nonzero coefficient remains.
MerminScenario build_scenario(const FiniteAbelianGroup& k, const ZModEquation& eqn,
                              const TorusAssignment& beta);
// Uses the canonical torus solution.
MerminScenario build_scenario(const FiniteAbelianGroup& k, const ZModEquation& eqn);

// Uniform 1/D^(N-1) on each context's fiber.
ProbabilisticModel empirical_model(const MerminScenario& s);

// One assignment per context (control first), aligned with the context domain.
using JointOutcome = std::vector<Assignment>;

// (sum over variations and parties) minus n_0 times (sum over the control).
GroupElement f_S_pushforward(const MerminScenario& s, const JointOutcome& jo);

// Explicit local hidden variable model from a K-solution b.
Distribution<ProbabilitySemiring> lhv_when_solvable(const MerminScenario& s, const GroupAssignment& b);

// Product of independent scenarios over a common group. Measurement labels get
// an "S<f>:" prefix; contexts are all tuples of factor contexts, first factor
// most significant.
struct CompositeScenario {
  FiniteAbelianGroup group;
  std::vector<MerminScenario> factors;
  std::vector<std::size_t> offsets;                      // first measurement of each factor
  std::vector<std::vector<std::size_t>> context_factors; // factor context per composite context
  MeasurementScenario measurement;
};

CompositeScenario tensor_scenarios(std::vector<MerminScenario> factors);

// Scenarios for every equation of a system, sharing one joint torus solution.
CompositeScenario build_system_scenario(const EquationSystem& sys);

ProbabilisticModel composite_empirical_model(const CompositeScenario& cs);

// Product of per-factor hidden variable models; one K-solution per factor.
Distribution<ProbabilitySemiring> composite_lhv(const CompositeScenario& cs,
                                                const std::vector<GroupAssignment>& solutions);

}  // namespace ctxf
