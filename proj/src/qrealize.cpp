#include "ctxf/qrealize.hpp"

#include <cmath>

#include "ctxf/errors.hpp"

namespace ctxf {

namespace {

std::size_t ipow(Integer base, std::size_t exp) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) out *= static_cast<std::size_t>(base);
  return out;
}

// Group index of the sum of the tuple encoded by a flat index.
Integer tuple_sum(const FiniteAbelianGroup& g, std::size_t flat, std::size_t parties) {
  const auto d = static_cast<std::size_t>(g.order());
  Integer acc = 0;
  for (std::size_t i = 0; i < parties; ++i) {
    acc = g.add_index(acc, static_cast<Integer>(flat % d));
    flat /= d;
  }
  return acc;
}

TorusPoint phase_sum(const FiniteAbelianGroup& g, const std::vector<TorusPoint>& alphas) {
  TorusPoint acc = TorusPoint::zero(g.order());
  for (const auto& a : alphas) {
    if (static_cast<Integer>(a.dimension()) != g.order() - 1) {
      throw StructuralError("phase " + a.to_string() + " has the wrong dimension for " +
                            g.to_string());
    }
    acc = acc + a;
  }
  return acc;
}

LemmaCheck realizability(const FiniteAbelianGroup& g, std::size_t parties,
                         const std::vector<TorusPoint>& alphas) {
  if (alphas.size() != parties) throw StructuralError("one phase per party is required");
  if (parties == 0) throw StructuralError("at least one party is required");
  LemmaCheck out;
  TorusPoint total = phase_sum(g, alphas);
  out.target = g.torus_to_classical(total);
  if (!out.target) {
    out.status = LemmaCheck::Status::Unrealizable;
    out.message = "phase sum " + total.to_string() +
                  " is not an X-classical point; the context is not realizable";
  }
  return out;
}

}  // namespace

ComplexMatrix character_matrix(const FiniteAbelianGroup& g) {
  const auto d = static_cast<Eigen::Index>(g.order());
  const auto elems = g.elements();
  ComplexMatrix m(d, d);
  for (Eigen::Index y = 0; y < d; ++y) {
    for (Eigen::Index x = 0; x < d; ++x) {
      m(y, x) = g.pairing(elems[static_cast<std::size_t>(y)], elems[static_cast<std::size_t>(x)]).phase();
    }
  }
  return m;
}

StateVector ghz_state(const FiniteAbelianGroup& g, std::size_t parties, const GroupElement& x) {
  if (parties == 0) throw StructuralError("a GHZ state needs at least one party");
  const Integer target = g.index_of(x);
  StateVector s;
  s.dim = g.order();
  s.parties = parties;
  const std::size_t size = ipow(g.order(), parties);
  s.amplitudes = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(size));
  for (std::size_t flat = 0; flat < size; ++flat) {
    if (tuple_sum(g, flat, parties) == target) s.amplitudes(static_cast<Eigen::Index>(flat)) = 1.0;
  }
  return s;
}

ComplexMatrix phase_gate(const FiniteAbelianGroup& g, const TorusPoint& alpha) {
  const Integer d = g.order();
  if (static_cast<Integer>(alpha.dimension()) != d - 1) {
    throw StructuralError("phase " + alpha.to_string() + " has the wrong dimension for " + g.to_string());
  }
  const auto elems = g.elements();
  // Convolution kernel psi(z) = (1/D) sum_y exp(2 pi i (alpha_y - pairing(y, z))).
  std::vector<std::complex<double>> kernel(static_cast<std::size_t>(d));
  for (Integer z = 0; z < d; ++z) {
    std::complex<double> acc = 0.0;
    for (Integer y = 0; y < d; ++y) {
      acc += (alpha.at(y) - g.pairing(elems[static_cast<std::size_t>(y)],
                                      elems[static_cast<std::size_t>(z)])).phase();
    }
    kernel[static_cast<std::size_t>(z)] = acc / static_cast<double>(d);
  }
  ComplexMatrix m(d, d);
  for (Integer xp = 0; xp < d; ++xp) {
    for (Integer x = 0; x < d; ++x) {
      Integer diff = g.index_of(g.subtract(elems[static_cast<std::size_t>(xp)],
                                           elems[static_cast<std::size_t>(x)]));
      m(xp, x) = kernel[static_cast<std::size_t>(diff)];
    }
  }
  return m;
}

StateVector apply_local_gates(const StateVector& state, const std::vector<ComplexMatrix>& gates) {
  if (gates.size() != state.parties) throw StructuralError("one gate per party is required");
  const auto d = static_cast<std::size_t>(state.dim);
  StateVector out = state;
  Eigen::VectorXcd scratch(static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < state.parties; ++i) {
    const ComplexMatrix& u = gates[i];
    if (static_cast<std::size_t>(u.rows()) != d || static_cast<std::size_t>(u.cols()) != d) {
      throw StructuralError("gate dimension does not match the state");
    }
    const std::size_t stride = ipow(state.dim, state.parties - 1 - i);
    const std::size_t block = stride * d;
    const auto size = static_cast<std::size_t>(out.amplitudes.size());
    for (std::size_t base = 0; base < size; base += block) {
      for (std::size_t offset = 0; offset < stride; ++offset) {
        for (std::size_t k = 0; k < d; ++k) {
          scratch(static_cast<Eigen::Index>(k)) =
              out.amplitudes(static_cast<Eigen::Index>(base + offset + k * stride));
        }
        Eigen::VectorXcd mapped = u * scratch;
        for (std::size_t k = 0; k < d; ++k) {
          out.amplitudes(static_cast<Eigen::Index>(base + offset + k * stride)) =
              mapped(static_cast<Eigen::Index>(k));
        }
      }
    }
  }
  return out;
}

StateVector to_z_basis(const FiniteAbelianGroup& g, const StateVector& state) {
  return apply_local_gates(state, std::vector<ComplexMatrix>(state.parties, character_matrix(g)));
}

OutcomeDistribution measure_all_X(const StateVector& state) {
  OutcomeDistribution out;
  out.dim = state.dim;
  out.parties = state.parties;
  const double norm = state.amplitudes.squaredNorm();
  if (!(norm > 0.0)) throw DomainError("cannot measure the zero vector");
  out.weights.resize(static_cast<std::size_t>(state.amplitudes.size()));
  for (Eigen::Index i = 0; i < state.amplitudes.size(); ++i) {
    out.weights[static_cast<std::size_t>(i)] = std::norm(state.amplitudes(i)) / norm;
  }
  return out;
}

StateVector gated_ghz(const FiniteAbelianGroup& g, const std::vector<TorusPoint>& alphas) {
  std::vector<ComplexMatrix> gates;
  for (const auto& a : alphas) gates.push_back(phase_gate(g, a));
  return apply_local_gates(ghz_state(g, alphas.size(), g.zero()), gates);
}

OutcomeDistribution fiber_prediction(const FiniteAbelianGroup& g, std::size_t parties,
                                     const GroupElement& a) {
  OutcomeDistribution out;
  out.dim = g.order();
  out.parties = parties;
  const std::size_t size = ipow(g.order(), parties);
  const double w = 1.0 / static_cast<double>(ipow(g.order(), parties - 1));
  const Integer target = g.index_of(a);
  out.weights.assign(size, 0.0);
  for (std::size_t flat = 0; flat < size; ++flat) {
    if (tuple_sum(g, flat, parties) == target) out.weights[flat] = w;
  }
  return out;
}

double max_deviation(const OutcomeDistribution& p, const OutcomeDistribution& q) {
  if (p.weights.size() != q.weights.size()) throw StructuralError("distributions differ in size");
  double worst = 0.0;
  for (std::size_t i = 0; i < p.weights.size(); ++i) {
    worst = std::max(worst, std::abs(p.weights[i] - q.weights[i]));
  }
  return worst;
}

LemmaCheck check_parity_lemma(const FiniteAbelianGroup& g, std::size_t parties,
                              const std::vector<TorusPoint>& alphas, double tolerance) {
  LemmaCheck out = realizability(g, parties, alphas);
  if (out.status == LemmaCheck::Status::Unrealizable) return out;
  OutcomeDistribution measured = measure_all_X(gated_ghz(g, alphas));
  std::vector<double> pushed(static_cast<std::size_t>(g.order()), 0.0);
  for (std::size_t flat = 0; flat < measured.weights.size(); ++flat) {
    pushed[static_cast<std::size_t>(tuple_sum(g, flat, parties))] += measured.weights[flat];
  }
  const auto target = static_cast<std::size_t>(g.index_of(*out.target));
  double tv = 0.0;
  for (std::size_t v = 0; v < pushed.size(); ++v) tv += std::abs(pushed[v] - (v == target ? 1.0 : 0.0));
  out.deviation = tv / 2.0;
  out.status = out.deviation < tolerance ? LemmaCheck::Status::Holds : LemmaCheck::Status::Violated;
  out.message = "parity outcome " + g.format(*out.target) + ", total variation " +
                std::to_string(out.deviation);
  return out;
}

LemmaCheck check_decoherence_lemma(const FiniteAbelianGroup& g, std::size_t parties,
                                   const std::vector<TorusPoint>& alphas, double tolerance) {
  LemmaCheck out = realizability(g, parties, alphas);
  if (out.status == LemmaCheck::Status::Unrealizable) return out;
  OutcomeDistribution gated = measure_all_X(gated_ghz(g, alphas));
  OutcomeDistribution plain = measure_all_X(ghz_state(g, parties, *out.target));
  out.deviation = max_deviation(gated, plain);
  out.status = out.deviation < tolerance ? LemmaCheck::Status::Holds : LemmaCheck::Status::Violated;
  out.message = "matches GHZ at " + g.format(*out.target) + ", max deviation " +
                std::to_string(out.deviation);
  return out;
}

std::string to_string(LemmaCheck::Status status) {
  switch (status) {
    case LemmaCheck::Status::Holds:
      return "holds";
    case LemmaCheck::Status::Violated:
      return "violated";
    case LemmaCheck::Status::Unrealizable:
      return "unrealizable";
  }
  return "unknown";
}

}  // namespace ctxf
