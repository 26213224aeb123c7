#pragma once

#include <map>
#include <string>
#include <utility>

#include <boost/multiprecision/cpp_int.hpp>

#include "kslice/error.hpp"

namespace kslice {

using BigInt = boost::multiprecision::cpp_int;

/// Finitely supported integer Laurent polynomial in t. Zero coefficients are
/// never stored.
class LaurentPolynomial {
 public:
  using Terms = std::map<int, BigInt>;

  LaurentPolynomial() = default;
  LaurentPolynomial(long long constant) {  // NOLINT: implicit from integer
    if (constant != 0) terms_[0] = constant;
  }

  static LaurentPolynomial monomial(BigInt coefficient, int exponent) {
    LaurentPolynomial p;
    if (coefficient != 0) p.terms_[exponent] = std::move(coefficient);
    return p;
  }
  static LaurentPolynomial t(int exponent = 1) { return monomial(1, exponent); }

  static LaurentPolynomial from_terms(const Terms& terms) {
    LaurentPolynomial p;
    for (const auto& [e, c] : terms)
      if (c != 0) p.terms_[e] = c;
    return p;
  }

  const Terms& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  int min_exponent() const { return terms_.begin()->first; }
  int max_exponent() const { return terms_.rbegin()->first; }

  BigInt coefficient(int exponent) const {
    auto it = terms_.find(exponent);
    return it == terms_.end() ? BigInt(0) : it->second;
  }

  LaurentPolynomial& operator+=(const LaurentPolynomial& o) {
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  LaurentPolynomial& operator-=(const LaurentPolynomial& o) {
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }
  friend LaurentPolynomial operator+(LaurentPolynomial a, const LaurentPolynomial& b) { return a += b; }
  friend LaurentPolynomial operator-(LaurentPolynomial a, const LaurentPolynomial& b) { return a -= b; }
  LaurentPolynomial operator-() const {
    LaurentPolynomial r;
    for (const auto& [e, c] : terms_) r.terms_[e] = -c;
    return r;
  }

  friend LaurentPolynomial operator*(const LaurentPolynomial& a, const LaurentPolynomial& b) {
    LaurentPolynomial r;
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) r.add_term(ea + eb, ca * cb);
    return r;
  }
  LaurentPolynomial& operator*=(const LaurentPolynomial& o) { return *this = *this * o; }

  /// t -> t^-1
  LaurentPolynomial inverted() const {
    LaurentPolynomial r;
    for (const auto& [e, c] : terms_) r.terms_[-e] = c;
    return r;
  }

  LaurentPolynomial shifted(int by) const {
    LaurentPolynomial r;
    for (const auto& [e, c] : terms_) r.terms_[e + by] = c;
    return r;
  }

  BigInt evaluate(long long x) const {
    // only used at t = +-1, where negative exponents are harmless
    detail::require(x == 1 || x == -1, ErrorCode::invalid_argument,
                    "Laurent evaluation supported at t = 1 and t = -1 only");
    BigInt total = 0;
    for (const auto& [e, c] : terms_) total += (x == -1 && (e % 2 != 0)) ? BigInt(-c) : c;
    return total;
  }

  /// Exact quotient; throws if `divisor` does not divide this polynomial.
  LaurentPolynomial divide_exact(const LaurentPolynomial& divisor) const {
    detail::require(!divisor.is_zero(), ErrorCode::internal, "Laurent division by zero");
    if (is_zero()) return {};
    LaurentPolynomial rem = *this;
    LaurentPolynomial quotient;
    const int dlead = divisor.max_exponent();
    const int dlow = divisor.min_exponent();
    const BigInt& lc = divisor.terms_.rbegin()->second;
    while (!rem.is_zero()) {
      const int e = rem.max_exponent() - dlead;
      if (rem.max_exponent() - rem.min_exponent() < dlead - dlow)
        detail::fail(ErrorCode::internal, "Laurent division is not exact");
      const BigInt& rc = rem.terms_.rbegin()->second;
      if (rc % lc != 0) detail::fail(ErrorCode::internal, "Laurent division is not exact");
      const auto q = monomial(rc / lc, e);
      quotient += q;
      rem -= q * divisor;
    }
    return quotient;
  }

  friend bool operator==(const LaurentPolynomial&, const LaurentPolynomial&) = default;

 private:
  void add_term(int e, const BigInt& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  Terms terms_;
};

/// Renders with descending exponents, e.g. "-t+3-t^-1".
inline std::string to_string(const LaurentPolynomial& p) {
  if (p.is_zero()) return "0";
  std::string out;
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
    const int e = it->first;
    BigInt c = it->second;
    const bool negative = c < 0;
    if (negative) c = -c;
    if (negative) out += '-';
    else if (!out.empty()) out += '+';
    if (e == 0) {
      out += c.str();
      continue;
    }
    if (c != 1) out += c.str();
    out += 't';
    if (e != 1) out += "^" + std::to_string(e);
  }
  return out;
}

/// True if a = +-t^k * b for some k.
inline bool equal_up_to_unit(const LaurentPolynomial& a, const LaurentPolynomial& b) {
  if (a.is_zero() || b.is_zero()) return a.is_zero() && b.is_zero();
  const int shift = a.min_exponent() - b.min_exponent();
  const auto bs = b.shifted(shift);
  return a == bs || a == -bs;
}

}  // namespace kslice
