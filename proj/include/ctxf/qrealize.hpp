#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "ctxf/abgroup.hpp"

namespace ctxf {

using ComplexMatrix = Eigen::MatrixXcd;

inline constexpr double kRealizeTolerance = 1e-9;

// Dense amplitudes over K^N in the X basis. Tuple (x_1, ..., x_N) sits at
// index sum_i idx(x_i) * D^(N-i), so x_1 is most significant.
struct StateVector {
  Integer dim = 1;  // D
  std::size_t parties = 0;
  Eigen::VectorXcd amplitudes;
};

// Normalized outcome weights over K^N, same indexing as StateVector.
struct OutcomeDistribution {
  Integer dim = 1;
  std::size_t parties = 0;
  std::vector<double> weights;
};

// Entry (y, x) = exp(2 pi i pairing(y, x)).
ComplexMatrix character_matrix(const FiniteAbelianGroup& g);

// Unnormalized: amplitude 1 on tuples summing to x.
StateVector ghz_state(const FiniteAbelianGroup& g, std::size_t parties, const GroupElement& x);

// X-basis matrix of the gate that is diag(exp(2 pi i alpha_y)) in the Z basis.
ComplexMatrix phase_gate(const FiniteAbelianGroup& g, const TorusPoint& alpha);

// Applies one single-site gate per party.
StateVector apply_local_gates(const StateVector& state, const std::vector<ComplexMatrix>& gates);

// Change of basis X -> Z on every site: amplitude of |z_y1 ... z_yN>.
StateVector to_z_basis(const FiniteAbelianGroup& g, const StateVector& state);

// Throws DomainError on a zero vector.
OutcomeDistribution measure_all_X(const StateVector& state);

// GHZ_0 on N = alphas.size() parties with gate alpha_i on party i.
StateVector gated_ghz(const FiniteAbelianGroup& g, const std::vector<TorusPoint>& alphas);

// Uniform 1/D^(N-1) on the fiber {sum x_i = a}.
OutcomeDistribution fiber_prediction(const FiniteAbelianGroup& g, std::size_t parties,
                                     const GroupElement& a);

double max_deviation(const OutcomeDistribution& p, const OutcomeDistribution& q);

struct LemmaCheck {
  enum class Status { Holds, Violated, Unrealizable };
  Status status = Status::Violated;
  // The classical point the phases sum to, when there is one.
  std::optional<GroupElement> target;
  double deviation = 0.0;
  std::string message;

  bool holds() const { return status == Status::Holds; }
};

// Pushforward of the gated-GHZ X statistics along (x_i) -> sum x_i must be a
// point mass at the classical phase sum.
LemmaCheck check_parity_lemma(const FiniteAbelianGroup& g, std::size_t parties,
                              const std::vector<TorusPoint>& alphas,
                              double tolerance = kRealizeTolerance);

// Gated-GHZ X statistics must equal those of GHZ at the classical phase sum.
LemmaCheck check_decoherence_lemma(const FiniteAbelianGroup& g, std::size_t parties,
                                   const std::vector<TorusPoint>& alphas,
                                   double tolerance = kRealizeTolerance);

std::string to_string(LemmaCheck::Status status);

}  // namespace ctxf
