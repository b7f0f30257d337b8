#include "ctxf/exact_linalg.hpp"

#include <cstdint>

#include "ctxf/errors.hpp"

namespace ctxf {

bool satisfies_exactly(const SparseMatrix& a, const std::vector<mpq_class>& x,
                       const std::vector<mpq_class>& b) {
  if (x.size() != a.cols || b.size() != a.rows) return false;
  for (std::size_t i = 0; i < a.rows; ++i) {
    mpq_class acc = 0;
    for (const auto& [j, v] : a.entries[i]) acc += v * x[j];
    if (acc != b[i]) return false;
  }
  return true;
}

// --------------------------------------------------------------------- simplex

std::optional<std::vector<mpq_class>> find_nonnegative_solution(const SparseMatrix& a,
                                                                const std::vector<mpq_class>& b) {
  if (b.size() != a.rows) throw StructuralError("rhs length does not match the matrix");
  const std::size_t m = a.rows;
  const std::size_t n = a.cols;
  const std::size_t width = n + m + 1;  // originals, artificials, rhs
  const std::size_t rhs = n + m;

  std::vector<std::vector<mpq_class>> t(m + 1, std::vector<mpq_class>(width));
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    const bool flip = b[i] < 0;
    for (const auto& [j, v] : a.entries[i]) t[i][j] = flip ? mpq_class(-v) : v;
    t[i][n + i] = 1;
    t[i][rhs] = flip ? mpq_class(-b[i]) : b[i];
    basis[i] = n + i;
  }
  // Objective row holds reduced costs of sum(artificials), expressed in the
  // nonbasic variables.
  auto& obj = t[m];
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (sgn(t[i][j]) != 0) obj[j] -= t[i][j];
    }
    obj[rhs] -= t[i][rhs];
  }

  // Dantzig pricing is much faster in practice; a long run of degenerate
  // pivots switches to Bland's rule for good, which cannot cycle.
  constexpr std::size_t kDegenerateLimit = 64;
  std::size_t degenerate_run = 0;
  bool bland = false;
  std::vector<std::size_t> nonzero;
  while (true) {
    std::size_t enter = width;
    for (std::size_t j = 0; j < rhs; ++j) {
      if (sgn(obj[j]) >= 0) continue;
      if (bland) {
        enter = j;
        break;
      }
      if (enter == width || obj[j] < obj[enter]) enter = j;
    }
    if (enter == width) break;
    std::size_t leave = m;
    mpq_class best_ratio;
    for (std::size_t i = 0; i < m; ++i) {
      if (sgn(t[i][enter]) <= 0) continue;
      mpq_class ratio = t[i][rhs] / t[i][enter];
      if (leave == m || ratio < best_ratio || (ratio == best_ratio && basis[i] < basis[leave])) {
        leave = i;
        best_ratio = ratio;
      }
    }
    if (leave == m) throw InvariantViolation("phase-one objective is unbounded");
    if (sgn(best_ratio) == 0) {
      if (++degenerate_run > kDegenerateLimit) bland = true;
    } else {
      degenerate_run = 0;
    }
    const mpq_class pivot = t[leave][enter];
    nonzero.clear();
    for (std::size_t j = 0; j < width; ++j) {
      if (sgn(t[leave][j]) == 0) continue;
      t[leave][j] /= pivot;
      nonzero.push_back(j);
    }
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == leave || sgn(t[i][enter]) == 0) continue;
      const mpq_class factor = t[i][enter];
      for (std::size_t j : nonzero) t[i][j] -= factor * t[leave][j];
    }
    basis[leave] = enter;
  }

  if (sgn(obj[rhs]) != 0) return std::nullopt;
  std::vector<mpq_class> x(n);
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n) x[basis[i]] = t[i][rhs];
  }
  if (!satisfies_exactly(a, x, b)) throw InvariantViolation("simplex certificate failed verification");
  return x;
}

// ------------------------------------------------------ signed linear systems

namespace {

constexpr std::uint64_t kPrimes[] = {2147483647ULL, 2147483629ULL, 2147483587ULL, 2147483579ULL};

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t p) {
  std::uint64_t out = 1;
  base %= p;
  while (exp) {
    if (exp & 1) out = out * base % p;
    base = base * base % p;
    exp >>= 1;
  }
  return out;
}

std::uint64_t inv_mod(std::uint64_t v, std::uint64_t p) { return pow_mod(v, p - 2, p); }

std::optional<std::uint64_t> reduce_mod(const mpq_class& q, std::uint64_t p) {
  mpz_class pz(static_cast<unsigned long>(p));
  mpz_class num, den;
  mpz_fdiv_r(num.get_mpz_t(), q.get_num_mpz_t(), pz.get_mpz_t());
  mpz_fdiv_r(den.get_mpz_t(), q.get_den_mpz_t(), pz.get_mpz_t());
  if (den == 0) return std::nullopt;
  return num.get_ui() * inv_mod(den.get_ui(), p) % p;
}

struct ModPBasis {
  std::vector<std::size_t> rows;
  std::vector<std::size_t> pivots;
};

// Independent rows (in input order) and their pivot columns modulo p.
std::optional<ModPBasis> select_basis(const SparseMatrix& a, std::uint64_t p) {
  ModPBasis out;
  std::vector<std::vector<std::uint64_t>> reduced;
  std::vector<std::uint64_t> row(a.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    std::fill(row.begin(), row.end(), 0);
    for (const auto& [j, v] : a.entries[i]) {
      auto r = reduce_mod(v, p);
      if (!r) return std::nullopt;
      row[j] = *r;
    }
    for (std::size_t k = 0; k < reduced.size(); ++k) {
      const std::uint64_t f = row[out.pivots[k]];
      if (f == 0) continue;
      const auto& basis_row = reduced[k];
      for (std::size_t j = out.pivots[k]; j < a.cols; ++j) {
        if (basis_row[j] != 0) row[j] = (row[j] + (p - f) * basis_row[j]) % p;
      }
    }
    std::size_t pivot = a.cols;
    for (std::size_t j = 0; j < a.cols; ++j) {
      if (row[j] != 0) {
        pivot = j;
        break;
      }
    }
    if (pivot == a.cols) continue;
    const std::uint64_t inv = inv_mod(row[pivot], p);
    for (std::size_t j = pivot; j < a.cols; ++j) row[j] = row[j] * inv % p;
    reduced.push_back(row);
    out.rows.push_back(i);
    out.pivots.push_back(pivot);
  }
  return out;
}

// Solves the square system B x = c exactly; none if B is singular.
std::optional<std::vector<mpq_class>> solve_square(std::vector<std::vector<mpq_class>> m) {
  const std::size_t r = m.size();
  for (std::size_t c = 0; c < r; ++c) {
    std::size_t piv = r;
    for (std::size_t i = c; i < r; ++i) {
      if (sgn(m[i][c]) != 0) {
        piv = i;
        break;
      }
    }
    if (piv == r) return std::nullopt;
    std::swap(m[c], m[piv]);
    const mpq_class pivot = m[c][c];
    for (std::size_t j = c; j <= r; ++j) {
      if (sgn(m[c][j]) != 0) m[c][j] /= pivot;
    }
    for (std::size_t i = 0; i < r; ++i) {
      if (i == c || sgn(m[i][c]) == 0) continue;
      const mpq_class factor = m[i][c];
      for (std::size_t j = c; j <= r; ++j) {
        if (sgn(m[c][j]) != 0) m[i][j] -= factor * m[c][j];
      }
    }
  }
  std::vector<mpq_class> x(r);
  for (std::size_t i = 0; i < r; ++i) x[i] = m[i][r];
  return x;
}

}  // namespace

std::optional<std::vector<mpq_class>> find_rational_solution(const SparseMatrix& a,
                                                             const std::vector<mpq_class>& b) {
  if (b.size() != a.rows) throw StructuralError("rhs length does not match the matrix");
  for (std::uint64_t p : kPrimes) {
    auto basis = select_basis(a, p);
    if (!basis) continue;
    const std::size_t r = basis->rows.size();
    std::vector<std::size_t> column_slot(a.cols, r);
    for (std::size_t k = 0; k < r; ++k) column_slot[basis->pivots[k]] = k;
    std::vector<std::vector<mpq_class>> square(r, std::vector<mpq_class>(r + 1));
    for (std::size_t k = 0; k < r; ++k) {
      for (const auto& [j, v] : a.entries[basis->rows[k]]) {
        if (column_slot[j] < r) square[k][column_slot[j]] = v;
      }
      square[k][r] = b[basis->rows[k]];
    }
    auto sub = solve_square(std::move(square));
    if (!sub) continue;
    std::vector<mpq_class> x(a.cols);
    for (std::size_t k = 0; k < r; ++k) x[basis->pivots[k]] = (*sub)[k];
    if (satisfies_exactly(a, x, b)) return x;
  }
  return std::nullopt;
}

}  // namespace ctxf
