#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kslice/braid.hpp"
#include "kslice/error.hpp"
#include "kslice/laurent.hpp"
#include "kslice/matrix.hpp"

namespace kslice {

template <class T>
using Grid = std::vector<std::vector<T>>;

namespace detail {

inline BigInt exact_div(const BigInt& a, const BigInt& b) {
  require(a % b == 0, ErrorCode::internal, "integer division is not exact");
  return a / b;
}
inline LaurentPolynomial exact_div(const LaurentPolynomial& a, const LaurentPolynomial& b) {
  return a.divide_exact(b);
}
inline bool is_zero_entry(const BigInt& v) { return v == 0; }
inline bool is_zero_entry(const LaurentPolynomial& v) { return v.is_zero(); }

}  // namespace detail

/// Fraction-free (Bareiss) determinant over an integral domain with exact
/// division.
template <class R>
R bareiss_determinant(Grid<R> a) {
  const std::size_t n = a.size();
  if (n == 0) return R(1);
  R previous(1);
  bool negate = false;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (detail::is_zero_entry(a[k][k])) {
      std::size_t r = k + 1;
      while (r < n && detail::is_zero_entry(a[r][k])) ++r;
      if (r == n) return R(0);
      std::swap(a[r], a[k]);
      negate = !negate;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j)
        a[i][j] = detail::exact_div(a[i][j] * a[k][k] - a[i][k] * a[k][j], previous);
      a[i][k] = R(0);
    }
    previous = a[k][k];
  }
  R det = a[n - 1][n - 1];
  return negate ? R(0) - det : det;
}

using LaurentMatrix = Grid<LaurentPolynomial>;

/// Reduced Burau image of sigma_i^sign on n strands, (n-1) x (n-1).
inline LaurentMatrix reduced_burau(int n, Letter letter) {
  const std::size_t d = static_cast<std::size_t>(n - 1);
  LaurentMatrix m(d, std::vector<LaurentPolynomial>(d));
  for (std::size_t i = 0; i < d; ++i) m[i][i] = 1;
  const auto i = static_cast<std::size_t>(letter.generator - 1);  // 0-based block centre
  const auto t = LaurentPolynomial::t();
  const auto tinv = LaurentPolynomial::t(-1);
  if (letter.sign > 0) {
    m[i][i] = -t;
    if (i > 0) m[i - 1][i] = t;
    if (i + 1 < d) m[i + 1][i] = 1;
  } else {
    m[i][i] = -tinv;
    if (i > 0) m[i - 1][i] = 1;
    if (i + 1 < d) m[i + 1][i] = tinv;
  }
  return m;
}

inline LaurentMatrix multiply(const LaurentMatrix& a, const LaurentMatrix& b) {
  const std::size_t d = a.size();
  LaurentMatrix c(d, std::vector<LaurentPolynomial>(d));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = 0; k < d; ++k) {
      if (a[i][k].is_zero()) continue;
      for (std::size_t j = 0; j < d; ++j)
        if (!b[k][j].is_zero()) c[i][j] += a[i][k] * b[k][j];
    }
  return c;
}

inline LaurentMatrix reduced_burau(const BraidWord& word) {
  const std::size_t d = static_cast<std::size_t>(word.strand_count() - 1);
  LaurentMatrix m(d, std::vector<LaurentPolynomial>(d));
  for (std::size_t i = 0; i < d; ++i) m[i][i] = 1;
  for (const Letter& l : word.letters()) m = multiply(m, reduced_burau(word.strand_count(), l));
  return m;
}

/// Multiplies by +-t^k so the exponent range is centred on 0 and p(1) > 0.
inline LaurentPolynomial normalize_alexander(const LaurentPolynomial& p) {
  if (p.is_zero()) return p;
  const int span = p.max_exponent() + p.min_exponent();
  detail::require(span % 2 == 0, ErrorCode::internal,
                  "Alexander polynomial of a knot must have even exponent span");
  auto q = p.shifted(-span / 2);
  if (q.evaluate(1) < 0) q = -q;
  return q;
}

inline void require_knot(const BraidWord& word) {
  detail::require(closure_components(word).count() == 1, ErrorCode::multi_component,
                  "braid closure has " + std::to_string(closure_components(word).count()) +
                      " components; a knot is required");
}

/// Delta(t) = det(I - B(word)) (1 - t) / (1 - t^n), normalized symmetric with
/// Delta(1) = 1.
inline LaurentPolynomial alexander_polynomial(const BraidWord& word) {
  require_knot(word);
  const int n = word.strand_count();
  auto m = reduced_burau(word);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) m[i][j] = (i == j ? LaurentPolynomial(1) : LaurentPolynomial()) - m[i][j];
  const auto det = bareiss_determinant(m);
  const auto numerator = det * (LaurentPolynomial(1) - LaurentPolynomial::t());
  const auto delta = numerator.divide_exact(LaurentPolynomial(1) - LaurentPolynomial::t(n));
  auto normalized = normalize_alexander(delta);
  detail::require(normalized.evaluate(1) == 1, ErrorCode::internal,
                  "Alexander polynomial does not evaluate to 1 at t = 1");
  return normalized;
}

/// |Delta(-1)|.
inline std::int64_t determinant(const BraidWord& word) {
  const BigInt v = alexander_polynomial(word).evaluate(-1);
  const BigInt a = v < 0 ? BigInt(-v) : v;
  detail::require(a % 2 == 1, ErrorCode::internal, "knot determinant must be odd");
  return a.convert_to<std::int64_t>();
}

/// Arf invariant from Delta(-1) mod 8 (Murasugi): 0 for +-1, 1 for +-3.
inline int arf(const BraidWord& word) {
  const BigInt v = alexander_polynomial(word).evaluate(-1);
  BigInt r = v % 8;
  if (r < 0) r += 8;
  detail::require(r % 2 == 1, ErrorCode::internal, "Delta(-1) must be odd for a knot");
  return (r == 1 || r == 7) ? 0 : 1;
}

/// Seifert matrix of the braided (Bennequin) surface of the closure. Loops
/// run between consecutive occurrences of the same generator index.
inline IntMatrix seifert_matrix(const BraidWord& word) {
  require_knot(word);
  std::vector<int> x;
  for (const Letter& l : word.letters()) x.push_back(l.sign * l.generator);
  const std::size_t len = x.size();
  std::vector<std::size_t> next(len, 0);  // 0 = no later occurrence
  for (std::size_t i = 0; i < len; ++i)
    for (std::size_t j = i + 1; j < len; ++j)
      if (std::abs(x[j]) == std::abs(x[i])) {
        next[i] = j;
        break;
      }
  std::vector<std::size_t> loops;
  for (std::size_t i = 0; i < len; ++i)
    if (next[i]) loops.push_back(i);

  const auto sgn = [](int v) { return (v > 0) - (v < 0); };
  IntMatrix v(loops.size());
  for (std::size_t a = 0; a < loops.size(); ++a) {
    const std::size_t i = loops[a], hi = next[i];
    v(a, a) = -sgn(x[i] + x[hi]);
    for (std::size_t b = a + 1; b < loops.size(); ++b) {
      const std::size_t j = loops[b], hj = next[j];
      if (hi > hj || hi < j) continue;  // nested or disjoint
      if (hi == j) {                    // consecutive loops sharing band j
        if (x[j] > 0) v(a, b) = 1;
        else v(b, a) = -1;
        continue;
      }
      const int di = std::abs(x[i]), dj = std::abs(x[j]);
      if (di - dj == 1) v(b, a) = -1;
      else if (dj - di == 1) v(a, b) = 1;
    }
  }
  return v;
}

/// det(V - t V^T), the Seifert-route Alexander polynomial (unnormalized).
inline LaurentPolynomial seifert_alexander(const IntMatrix& v) {
  const std::size_t n = v.size();
  LaurentMatrix m(n, std::vector<LaurentPolynomial>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      m[i][j] = LaurentPolynomial(v(i, j)) - LaurentPolynomial::monomial(v(j, i), 1);
  return bareiss_determinant(m);
}

inline BigInt integer_determinant(const IntMatrix& m) {
  Grid<BigInt> g(m.size(), std::vector<BigInt>(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) g[i][j] = m(i, j);
  return bareiss_determinant(g);
}

}  // namespace kslice
