#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "kslice/error.hpp"
#include "kslice/matrix.hpp"

namespace kslice {

/// Packed vector over GF(2).
class Gf2Vector {
 public:
  Gf2Vector() = default;
  explicit Gf2Vector(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {}

  static Gf2Vector from_bools(const std::vector<bool>& bits) {
    Gf2Vector v(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i)
      if (bits[i]) v.set(i);
    return v;
  }

  std::size_t size() const noexcept { return n_; }

  bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1U; }
  void set(std::size_t i, bool value = true) {
    const std::uint64_t bit = std::uint64_t{1} << (i % 64);
    if (value) words_[i / 64] |= bit;
    else words_[i / 64] &= ~bit;
  }
  void flip(std::size_t i) { words_[i / 64] ^= std::uint64_t{1} << (i % 64); }

  Gf2Vector& operator^=(const Gf2Vector& other) {
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= other.words_[w];
    return *this;
  }
  friend Gf2Vector operator^(Gf2Vector a, const Gf2Vector& b) { return a ^= b; }

  bool none() const {
    for (auto w : words_)
      if (w) return false;
    return true;
  }
  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }

  std::vector<bool> to_bools() const {
    std::vector<bool> out(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = test(i);
    return out;
  }

  friend bool operator==(const Gf2Vector&, const Gf2Vector&) = default;
  friend auto operator<=>(const Gf2Vector& a, const Gf2Vector& b) {
    return a.to_bools() <=> b.to_bools();
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Affine solution set {particular + span(kernel)} of the characteristic
/// congruence (L x)_i = L_ii (mod 2).
struct CharacteristicSolutions {
  Gf2Vector particular;
  std::vector<Gf2Vector> kernel;

  std::size_t dimension() const noexcept { return particular.size(); }

  bool contains(const Gf2Vector& x) const {
    // kernel is kept in reduced echelon form keyed by each vector's pivot
    Gf2Vector r = x ^ particular;
    for (std::size_t k = 0; k < kernel.size(); ++k)
      if (r.test(pivots[k])) r ^= kernel[k];
    return r.none();
  }

  /// All 2^k solutions; only sensible for small kernels.
  std::vector<Gf2Vector> enumerate() const {
    detail::require(kernel.size() < 24, ErrorCode::invalid_argument,
                    "solution set too large to enumerate");
    std::vector<Gf2Vector> out;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << kernel.size()); ++mask) {
      Gf2Vector v = particular;
      for (std::size_t k = 0; k < kernel.size(); ++k)
        if ((mask >> k) & 1U) v ^= kernel[k];
      out.push_back(std::move(v));
    }
    return out;
  }

  std::vector<std::size_t> pivots;
};

/// True iff `mask` satisfies the characteristic congruence at every row.
inline bool is_characteristic(const IntMatrix& linking, const std::vector<bool>& mask) {
  for (std::size_t i = 0; i < linking.size(); ++i) {
    std::int64_t total = 0;
    for (std::size_t j = 0; j < linking.size(); ++j)
      if (mask[j]) total += linking(i, j);
    if (((total - linking(i, i)) & 1) != 0) return false;
  }
  return true;
}

/// Solves L x = diag(L) over GF(2) by Gauss-Jordan elimination.
inline CharacteristicSolutions characteristic_sublinks(const IntMatrix& linking) {
  detail::require(linking.is_symmetric(), ErrorCode::not_symmetric,
                  "linking matrix must be symmetric");
  const std::size_t m = linking.size();
  // augmented rows: columns 0..m-1 are L mod 2, column m the right-hand side
  std::vector<Gf2Vector> rows(m, Gf2Vector(m + 1));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j)
      if (linking(i, j) & 1) rows[i].set(j);
    if (linking(i, i) & 1) rows[i].set(m);
  }
  std::vector<std::size_t> pivot_col;
  std::size_t rank = 0;
  for (std::size_t col = 0; col < m && rank < m; ++col) {
    std::size_t r = rank;
    while (r < m && !rows[r].test(col)) ++r;
    if (r == m) continue;
    std::swap(rows[r], rows[rank]);
    for (std::size_t i = 0; i < m; ++i)
      if (i != rank && rows[i].test(col)) rows[i] ^= rows[rank];
    pivot_col.push_back(col);
    ++rank;
  }
  for (std::size_t i = rank; i < m; ++i)
    detail::require(!rows[i].test(m), ErrorCode::internal,
                    "characteristic congruence inconsistent for a symmetric matrix");

  CharacteristicSolutions out;
  out.particular = Gf2Vector(m);
  std::vector<bool> is_pivot(m, false);
  for (std::size_t k = 0; k < rank; ++k) {
    is_pivot[pivot_col[k]] = true;
    if (rows[k].test(m)) out.particular.set(pivot_col[k]);
  }
  for (std::size_t free = 0; free < m; ++free) {
    if (is_pivot[free]) continue;
    Gf2Vector v(m);
    v.set(free);
    for (std::size_t k = 0; k < rank; ++k)
      if (rows[k].test(free)) v.set(pivot_col[k]);
    out.kernel.push_back(std::move(v));
    out.pivots.push_back(free);
  }
  return out;
}

}  // namespace kslice
