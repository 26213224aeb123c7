#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "kslice/error.hpp"

namespace kslice {

/// Dense square integer matrix, row-major. Used for linking matrices, whose
/// diagonal carries the framings.
class IntMatrix {
 public:
  using value_type = std::int64_t;

  IntMatrix() = default;
  explicit IntMatrix(std::size_t n) : n_(n), data_(n * n, 0) {}

  IntMatrix(std::initializer_list<std::initializer_list<value_type>> rows)
      : n_(rows.size()), data_() {
    data_.reserve(n_ * n_);
    for (const auto& row : rows) {
      detail::require(row.size() == n_, ErrorCode::invalid_argument,
                      "matrix rows must all have length " + std::to_string(n_));
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static IntMatrix from_row_major(std::size_t n, std::vector<value_type> values) {
    detail::require(values.size() == n * n, ErrorCode::invalid_argument,
                    "row-major data has " + std::to_string(values.size()) +
                        " entries, expected " + std::to_string(n * n));
    IntMatrix m;
    m.n_ = n;
    m.data_ = std::move(values);
    return m;
  }

  static IntMatrix diagonal(const std::vector<value_type>& diag) {
    IntMatrix m(diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return m;
  }

  std::size_t size() const noexcept { return n_; }
  bool empty() const noexcept { return n_ == 0; }

  value_type& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  value_type operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

  const std::vector<value_type>& row_major() const noexcept { return data_; }

  bool is_symmetric() const {
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i + 1; j < n_; ++j)
        if ((*this)(i, j) != (*this)(j, i)) return false;
    return true;
  }

  /// Appends a row/column; `border` holds the off-diagonal entries against the
  /// existing indices.
  void append(const std::vector<value_type>& border, value_type diag) {
    detail::require(border.size() == n_, ErrorCode::invalid_argument,
                    "border length mismatch");
    const std::size_t m = n_ + 1;
    data_.resize(m * m, 0);
    // rows move to their wider positions, last row first
    for (std::size_t i = n_; i-- > 0;) {
      std::copy_backward(data_.begin() + static_cast<std::ptrdiff_t>(i * n_),
                         data_.begin() + static_cast<std::ptrdiff_t>(i * n_ + n_),
                         data_.begin() + static_cast<std::ptrdiff_t>(i * m + n_));
      data_[i * m + n_] = border[i];
    }
    for (std::size_t j = 0; j < n_; ++j) data_[n_ * m + j] = border[j];
    data_[n_ * m + n_] = diag;
    ++n_;
  }

  void erase(std::size_t k) {
    std::vector<value_type> next;
    next.reserve((n_ - 1) * (n_ - 1));
    for (std::size_t i = 0; i < n_; ++i) {
      if (i == k) continue;
      for (std::size_t j = 0; j < n_; ++j)
        if (j != k) next.push_back((*this)(i, j));
    }
    data_ = std::move(next);
    --n_;
  }

  IntMatrix transposed() const {
    IntMatrix t(n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
    detail::require(a.n_ == b.n_, ErrorCode::invalid_argument, "dimension mismatch");
    IntMatrix c(a.n_);
    for (std::size_t i = 0; i < a.n_; ++i)
      for (std::size_t k = 0; k < a.n_; ++k) {
        const value_type aik = a(i, k);
        if (aik == 0) continue;
        for (std::size_t j = 0; j < a.n_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend bool operator==(const IntMatrix&, const IntMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<value_type> data_;
};

inline std::string to_string(const IntMatrix& m) {
  std::string out = "[";
  for (std::size_t i = 0; i < m.size(); ++i) {
    out += i ? ",[" : "[";
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (j) out += ",";
      out += std::to_string(m(i, j));
    }
    out += "]";
  }
  return out + "]";
}

}  // namespace kslice
