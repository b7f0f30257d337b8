#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace ctxf {

// Row-major sparse matrix with exact rational entries. Column indices within
// a row are strictly increasing.
struct SparseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::vector<std::pair<std::size_t, mpq_class>>> entries;

  SparseMatrix() = default;
  SparseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), entries(r) {}
};

bool satisfies_exactly(const SparseMatrix& a, const std::vector<mpq_class>& x,
                       const std::vector<mpq_class>& b);

// Some x >= 0 with A x = b, or none. Phase-one simplex on a dense exact
// tableau: Dantzig pricing, falling back to Bland's rule after a run of
// degenerate pivots so it terminates. The result is re-verified.
std::optional<std::vector<mpq_class>> find_nonnegative_solution(const SparseMatrix& a,
                                                                const std::vector<mpq_class>& b);

// Some x with A x = b (no sign constraint), or none. Rank and pivot choice
// come from elimination modulo a large prime; the square subsystem is then
// solved exactly and every row verified. Returns none only if no prime in the
// retry list produces a verified solution.
std::optional<std::vector<mpq_class>> find_rational_solution(const SparseMatrix& a,
                                                             const std::vector<mpq_class>& b);

}  // namespace ctxf
