#pragma once

#include <utility>
#include <vector>

#include "twirl/errors.hpp"
#include "twirl/polynomial.hpp"
#include "twirl/rational_function.hpp"

namespace twirl {

namespace detail {

inline Polynomial poly_lcm(const Polynomial& a, const Polynomial& b) {
  return divide_exact(a * b, Polynomial::gcd(a, b));
}

}  // namespace detail

/// Exact solution of A x = b over rational functions.  Denominators are
/// cleared per row, the polynomial system is triangularized by fraction-free
/// (Bareiss) elimination, and the solution is recovered by back-substitution
/// with a final gcd reduction.  Throws SingularSystem on rank deficiency.
inline std::vector<RationalFunction> solve_linear_system(
    const std::vector<std::vector<RationalFunction>>& A, const std::vector<RationalFunction>& b) {
  const std::size_t n = A.size();
  if (n == 0) return {};
  if (b.size() != n) throw DimensionMismatch("solve_linear_system: rhs size mismatch");
  for (const auto& row : A)
    if (row.size() != n) throw DimensionMismatch("solve_linear_system: matrix not square");

  // clear denominators row by row
  std::vector<std::vector<Polynomial>> M(n, std::vector<Polynomial>(n + 1));
  for (std::size_t i = 0; i < n; ++i) {
    Polynomial l = Polynomial::constant(1);
    for (std::size_t j = 0; j < n; ++j) l = detail::poly_lcm(l, A[i][j].den());
    l = detail::poly_lcm(l, b[i].den());
    for (std::size_t j = 0; j < n; ++j) M[i][j] = A[i][j].num() * divide_exact(l, A[i][j].den());
    M[i][n] = b[i].num() * divide_exact(l, b[i].den());
  }

  // Bareiss elimination
  Polynomial prev = Polynomial::constant(1);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && M[piv][col].is_zero()) ++piv;
    if (piv == n) throw SingularSystem("rank deficiency at column " + std::to_string(col));
    if (piv != col) std::swap(M[piv], M[col]);
    for (std::size_t i = col + 1; i < n; ++i) {
      for (std::size_t j = col + 1; j <= n; ++j)
        M[i][j] = divide_exact(M[col][col] * M[i][j] - M[i][col] * M[col][j], prev);
      M[i][col] = Polynomial();
    }
    prev = M[col][col];
  }

  std::vector<RationalFunction> x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    RationalFunction s(M[ii][n], Polynomial::constant(1));
    for (std::size_t j = ii + 1; j < n; ++j)
      s -= RationalFunction(M[ii][j], Polynomial::constant(1)) * x[j];
    x[ii] = s / RationalFunction(M[ii][ii], Polynomial::constant(1));
  }
  return x;
}

/// Exact solve of a possibly overdetermined system (m >= n rows) over
/// rational functions by straightforward elimination with reduction.
/// Throws RankDeficient when the rows do not determine every unknown and
/// SingularSystem when the equations are inconsistent.
inline std::vector<RationalFunction> solve_rectangular_system(
    std::vector<std::vector<RationalFunction>> M, std::vector<RationalFunction> rhs,
    std::size_t unknowns) {
  const std::size_t m = M.size();
  if (rhs.size() != m) throw DimensionMismatch("solve_rectangular_system: rhs size mismatch");
  std::size_t row = 0;
  std::vector<std::size_t> pivot_row(unknowns, SIZE_MAX);
  for (std::size_t col = 0; col < unknowns && row < m; ++col) {
    std::size_t piv = row;
    while (piv < m && M[piv][col].is_zero()) ++piv;
    if (piv == m) continue;
    std::swap(M[piv], M[row]);
    std::swap(rhs[piv], rhs[row]);
    RationalFunction inv = RationalFunction(Polynomial::constant(1), Polynomial::constant(1)) / M[row][col];
    for (std::size_t j = col; j < unknowns; ++j) M[row][j] *= inv;
    rhs[row] *= inv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == row || M[i][col].is_zero()) continue;
      RationalFunction f = M[i][col];
      for (std::size_t j = col; j < unknowns; ++j) M[i][j] -= f * M[row][j];
      rhs[i] -= f * rhs[row];
    }
    pivot_row[col] = row;
    ++row;
  }
  for (std::size_t col = 0; col < unknowns; ++col)
    if (pivot_row[col] == SIZE_MAX)
      throw RankDeficient("unknown " + std::to_string(col) + " undetermined");
  for (std::size_t i = row; i < m; ++i)
    if (!rhs[i].is_zero()) throw SingularSystem("inconsistent equations");
  std::vector<RationalFunction> x(unknowns);
  for (std::size_t col = 0; col < unknowns; ++col) x[col] = rhs[pivot_row[col]];
  return x;
}

}  // namespace twirl
