#pragma once

// Independent reference computations used only by tests.

#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "kslice/kslice.hpp"

namespace oracle {

using kslice::BraidWord;
using kslice::IntMatrix;
using kslice::Letter;

/// Every mask x with (L x)_i = L_ii mod 2, by exhaustion.
inline std::set<std::vector<bool>> brute_force_characteristic(const IntMatrix& m) {
  const std::size_t n = m.size();
  std::set<std::vector<bool>> out;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
    std::vector<bool> mask(n);
    for (std::size_t i = 0; i < n; ++i) mask[i] = (bits >> i) & 1U;
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      std::int64_t total = 0;
      for (std::size_t j = 0; j < n; ++j)
        if (mask[j]) total += m(i, j);
      ok = ((total - m(i, i)) % 2 + 2) % 2 == 0;
    }
    if (ok) out.insert(mask);
  }
  return out;
}

/// Signature from cyclic Jacobi eigenvalues.
inline int eigen_signature(const IntMatrix& m) {
  const std::size_t n = m.size();
  std::vector<double> a(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i * n + j] = static_cast<double>(m(i, j));
  for (int sweep = 0; sweep < 200; ++sweep) {
    double off = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a[i * n + j] * a[i * n + j];
    if (off < 1e-24) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (std::fabs(apq) < 1e-300) continue;
        const double theta = (a[q * n + q] - a[p * n + p]) / (2 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(t * t + 1), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k * n + p], akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k], aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
      }
  }
  int sig = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i * n + i] > 1e-7) ++sig;
    else if (a[i * n + i] < -1e-7) --sig;
  }
  return sig;
}

inline IntMatrix random_symmetric(std::mt19937& rng, std::size_t n, int lo, int hi) {
  std::uniform_int_distribution<int> d(lo, hi);
  IntMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) m(i, j) = m(j, i) = d(rng);
  return m;
}

/// Random unimodular matrix as a product of elementary row operations.
inline IntMatrix random_unimodular(std::mt19937& rng, std::size_t n, int steps) {
  IntMatrix p = IntMatrix::diagonal(std::vector<std::int64_t>(n, 1));
  if (n < 2) return p;
  std::uniform_int_distribution<std::size_t> idx(0, n - 1);
  std::uniform_int_distribution<int> coef(-1, 1);
  for (int s = 0; s < steps; ++s) {
    const auto i = idx(rng), j = idx(rng);
    if (i == j) continue;
    const int c = coef(rng);
    for (std::size_t k = 0; k < n; ++k) p(i, k) += c * p(j, k);
  }
  return p;
}

inline BraidWord random_braid(std::mt19937& rng, int strands, int length) {
  std::uniform_int_distribution<int> g(1, strands - 1), s(0, 1);
  std::vector<Letter> letters;
  for (int i = 0; i < length; ++i) letters.push_back({g(rng), s(rng) ? 1 : -1});
  return BraidWord(strands, letters);
}

inline bool is_knot(const BraidWord& w) { return kslice::closure_components(w).count() == 1; }

/// Closure linking numbers by following explicit strand labels through the
/// word and counting signed crossings between distinct components.
inline IntMatrix crossing_count_linking(const BraidWord& w, const std::vector<std::int64_t>& framings) {
  const int n = w.strand_count();
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::vector<int> pos(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) pos[static_cast<std::size_t>(i)] = i;  // pos[slot] = strand label
  for (const auto& l : w.letters()) std::swap(pos[static_cast<std::size_t>(l.generator - 1)], pos[static_cast<std::size_t>(l.generator)]);
  // strand starting at slot pos[k] ends at slot k
  for (int k = 0; k < n; ++k) perm[static_cast<std::size_t>(pos[static_cast<std::size_t>(k)])] = k;
  std::vector<int> comp(static_cast<std::size_t>(n), -1);
  int count = 0;
  for (int s = 0; s < n; ++s) {
    if (comp[static_cast<std::size_t>(s)] >= 0) continue;
    for (int t = s; comp[static_cast<std::size_t>(t)] < 0; t = perm[static_cast<std::size_t>(t)])
      comp[static_cast<std::size_t>(t)] = count;
    ++count;
  }
  std::vector<std::vector<std::int64_t>> cross(static_cast<std::size_t>(count), std::vector<std::int64_t>(static_cast<std::size_t>(count)));
  for (int i = 0; i < n; ++i) pos[static_cast<std::size_t>(i)] = i;
  for (const auto& l : w.letters()) {
    const int a = comp[static_cast<std::size_t>(pos[static_cast<std::size_t>(l.generator - 1)])];
    const int b = comp[static_cast<std::size_t>(pos[static_cast<std::size_t>(l.generator)])];
    if (a != b) {
      cross[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] += l.sign;
      cross[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] += l.sign;
    }
    std::swap(pos[static_cast<std::size_t>(l.generator - 1)], pos[static_cast<std::size_t>(l.generator)]);
  }
  IntMatrix lk(static_cast<std::size_t>(count));
  for (std::size_t i = 0; i < lk.size(); ++i)
    for (std::size_t j = 0; j < lk.size(); ++j) lk(i, j) = i == j ? framings[i] : cross[i][j] / 2;
  return lk;
}

/// Alexander polynomial through the Seifert matrix of the braided surface,
/// normalized to the symmetric representative with value 1 at t = 1.
inline kslice::LaurentPolynomial seifert_route_alexander(const BraidWord& w) {
  const auto v = kslice::seifert_matrix(w);
  auto p = kslice::seifert_alexander(v);
  if (p.is_zero()) return p;
  const int span = p.max_exponent() + p.min_exponent();
  p = p.shifted(-span / 2);
  if (p.evaluate(1) < 0) p = -p;
  return p;
}

/// Closed forms for the torus recipe T(p, kp +- 1).
struct TorusTotals {
  std::int64_t b2, sigma, margin;
};
inline TorusTotals torus_closed_form(std::int64_t p, std::int64_t k) {
  return {k * p * p + k - 1, k * p * p - k, -k * p * p + 9 * k - 16};
}

}  // namespace oracle
