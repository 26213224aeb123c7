#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "kslice/error.hpp"
#include "kslice/matrix.hpp"

namespace kslice {
namespace detail {

struct IntegerOverflow {};

/// Arithmetic policies for the fraction-free elimination.
struct CheckedInt64 {
  using value_type = std::int64_t;
  static value_type mul(value_type a, value_type b) {
    value_type r;
    if (__builtin_mul_overflow(a, b, &r)) throw IntegerOverflow{};
    return r;
  }
  static value_type sub(value_type a, value_type b) {
    value_type r;
    if (__builtin_sub_overflow(a, b, &r)) throw IntegerOverflow{};
    return r;
  }
  static value_type add(value_type a, value_type b) {
    value_type r;
    if (__builtin_add_overflow(a, b, &r)) throw IntegerOverflow{};
    return r;
  }
  static value_type div(value_type a, value_type b) { return a / b; }
  static int sign(value_type a) { return (a > 0) - (a < 0); }
};

struct BigIntArithmetic {
  using value_type = boost::multiprecision::cpp_int;
  static value_type mul(const value_type& a, const value_type& b) { return a * b; }
  static value_type sub(const value_type& a, const value_type& b) { return a - b; }
  static value_type add(const value_type& a, const value_type& b) { return a + b; }
  static value_type div(const value_type& a, const value_type& b) { return a / b; }
  static int sign(const value_type& a) { return a.sign(); }
};

/// Symmetric Bareiss elimination. After each diagonal pivot the remaining
/// block holds bordered minors, so every division is exact; the sign of a
/// Schur pivot is sign(new minor) * sign(previous minor). When the remaining
/// diagonal vanishes, the congruence e_i <- e_i + e_j creates the pivot 2 a_ij.
template <class Ops>
int signature_fraction_free(const IntMatrix& m) {
  using Z = typename Ops::value_type;
  const std::size_t n = m.size();
  std::vector<Z> a(n * n);
  for (std::size_t i = 0; i < n * n; ++i) a[i] = Z(m.row_major()[i]);
  auto at = [&](std::size_t i, std::size_t j) -> Z& { return a[i * n + j]; };

  std::vector<std::size_t> live(n);
  std::iota(live.begin(), live.end(), 0);
  Z previous(1);
  int signature = 0;

  while (!live.empty()) {
    std::size_t pos = live.size();
    for (std::size_t k = 0; k < live.size(); ++k)
      if (Ops::sign(at(live[k], live[k])) != 0) {
        pos = k;
        break;
      }
    if (pos == live.size()) {
      std::size_t i = n, j = n;
      for (std::size_t x = 0; x < live.size() && i == n; ++x)
        for (std::size_t y = x + 1; y < live.size(); ++y)
          if (Ops::sign(at(live[x], live[y])) != 0) {
            i = live[x];
            j = live[y];
            pos = x;
            break;
          }
      if (i == n) break;  // remaining block is zero
      for (std::size_t c : live)
        if (c != i) at(i, c) = Ops::add(at(i, c), at(j, c));
      at(i, i) = Ops::add(at(i, j), at(i, j));  // a_ii = a_jj = 0 before the step
      for (std::size_t c : live)
        if (c != i) at(c, i) = at(i, c);
    }
    const std::size_t p = live[pos];
    const Z pivot = at(p, p);
    signature += Ops::sign(pivot) * Ops::sign(previous);
    live.erase(live.begin() + static_cast<std::ptrdiff_t>(pos));
    for (std::size_t r : live) {
      const Z arp = at(r, p);
      for (std::size_t c : live) {
        if (c < r) {
          at(r, c) = at(c, r);
          continue;
        }
        at(r, c) = Ops::div(Ops::sub(Ops::mul(pivot, at(r, c)), Ops::mul(arp, at(p, c))), previous);
      }
    }
    previous = pivot;
  }
  return signature;
}

}  // namespace detail

/// Exact signature of a symmetric integer matrix. Runs in checked int64 and
/// redoes the elimination in arbitrary precision on overflow.
inline int exact_signature(const IntMatrix& m) {
  detail::require(m.is_symmetric(), ErrorCode::not_symmetric,
                  "signature needs a symmetric matrix");
  try {
    return detail::signature_fraction_free<detail::CheckedInt64>(m);
  } catch (const detail::IntegerOverflow&) {
    return detail::signature_fraction_free<detail::BigIntArithmetic>(m);
  }
}

}  // namespace kslice
