#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kslice/error.hpp"
#include "kslice/matrix.hpp"

namespace kslice {

/// One braid generator sigma_i raised to +1 or -1.
struct Letter {
  int generator = 1;
  int sign = 1;

  Letter inverse() const { return {generator, -sign}; }
  friend bool operator==(const Letter&, const Letter&) = default;
};

/// A braid on `strand_count` strands. Strands are numbered 1..n from the left
/// and oriented downward; sigma_i crosses the strands in positions i and i+1
/// and counts as a positive crossing.
class BraidWord {
 public:
  BraidWord() : BraidWord(1, {}) {}

  BraidWord(int strand_count, std::vector<Letter> letters)
      : strands_(strand_count), letters_(std::move(letters)) {
    detail::require(strands_ >= 1, ErrorCode::invalid_argument,
                    "strand count must be at least 1");
    for (const Letter& l : letters_) {
      detail::require(l.generator >= 1 && l.generator <= strands_ - 1,
                      ErrorCode::generator_out_of_range,
                      "generator index " + std::to_string(l.generator) +
                          " outside [1," + std::to_string(strands_ - 1) + "]");
      detail::require(l.sign == 1 || l.sign == -1, ErrorCode::invalid_argument,
                      "letter sign must be +1 or -1");
    }
  }

  int strand_count() const noexcept { return strands_; }
  const std::vector<Letter>& letters() const noexcept { return letters_; }
  std::size_t size() const noexcept { return letters_.size(); }
  bool empty() const noexcept { return letters_.empty(); }

  BraidWord inverse() const {
    std::vector<Letter> inv;
    inv.reserve(letters_.size());
    for (auto it = letters_.rbegin(); it != letters_.rend(); ++it)
      inv.push_back(it->inverse());
    return {strands_, std::move(inv)};
  }

  /// strand_at(k)[q] is the top-position label of the strand sitting at
  /// position q (0-based) after the first k letters.
  std::vector<int> strand_at(std::size_t k) const {
    std::vector<int> at(static_cast<std::size_t>(strands_));
    std::iota(at.begin(), at.end(), 0);
    for (std::size_t i = 0; i < k && i < letters_.size(); ++i) {
      const auto g = static_cast<std::size_t>(letters_[i].generator);
      std::swap(at[g - 1], at[g]);
    }
    return at;
  }

  /// permutation()[s] is the bottom position reached by the strand that
  /// starts at top position s (0-based).
  std::vector<int> permutation() const {
    const auto at = strand_at(letters_.size());
    std::vector<int> perm(at.size());
    for (std::size_t q = 0; q < at.size(); ++q) perm[static_cast<std::size_t>(at[q])] = static_cast<int>(q);
    return perm;
  }

  friend bool operator==(const BraidWord&, const BraidWord&) = default;

 private:
  int strands_;
  std::vector<Letter> letters_;
};

namespace detail {

class BraidParser {
 public:
  BraidParser(std::string_view text, int strands) : text_(text), strands_(strands) {}

  std::vector<Letter> parse() {
    auto out = sequence();
    skip_space();
    if (pos_ < text_.size()) {
      if (text_[pos_] == ')') throw ParseError("unbalanced ')'", pos_);
      throw ParseError(std::string("unexpected character '") + text_[pos_] + "'", pos_);
    }
    return out;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::vector<Letter> sequence() {
    std::vector<Letter> out;
    for (;;) {
      skip_space();
      if (pos_ >= text_.size() || text_[pos_] == ')') return out;
      auto item = factor();
      out.insert(out.end(), item.begin(), item.end());
    }
  }

  std::vector<Letter> factor() {
    const std::size_t start = pos_;
    std::vector<Letter> base;
    if (text_[pos_] == '(') {
      ++pos_;
      base = sequence();
      skip_space();
      if (pos_ >= text_.size()) throw ParseError("unbalanced '(' opened here", start);
      ++pos_;  // ')'
    } else if (text_[pos_] == 's' || text_[pos_] == 'S') {
      ++pos_;
      const std::size_t digits = pos_;
      const long long index = integer(false);
      if (index < 1 || index > strands_ - 1) {
        throw ParseError("generator index " + std::to_string(index) + " outside [1," +
                             std::to_string(strands_ - 1) + "]",
                         digits);
      }
      base.push_back({static_cast<int>(index), 1});
    } else {
      throw ParseError(std::string("unexpected character '") + text_[pos_] + "'", pos_);
    }
    if (pos_ < text_.size() && text_[pos_] == '^') {
      ++pos_;
      const long long e = integer(true);
      return power(base, e);
    }
    return base;
  }

  long long integer(bool allow_sign) {
    const std::size_t start = pos_;
    bool negative = false;
    if (allow_sign && pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) {
      negative = text_[pos_] == '-';
      ++pos_;
    }
    const std::size_t digits = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (digits == pos_ || pos_ - digits > 9) {
      throw ParseError(allow_sign ? "malformed exponent" : "malformed generator index", start);
    }
    const long long v = std::stoll(std::string(text_.substr(digits, pos_ - digits)));
    return negative ? -v : v;
  }

  static std::vector<Letter> power(const std::vector<Letter>& base, long long e) {
    std::vector<Letter> unit = base;
    if (e < 0) {
      unit.clear();
      for (auto it = base.rbegin(); it != base.rend(); ++it) unit.push_back(it->inverse());
      e = -e;
    }
    std::vector<Letter> out;
    out.reserve(unit.size() * static_cast<std::size_t>(e));
    for (long long k = 0; k < e; ++k) out.insert(out.end(), unit.begin(), unit.end());
    return out;
  }

  std::string_view text_;
  int strands_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses `s<k>` atoms, `^<e>` exponents and parenthesized groups; group
/// exponents expand by repetition, a negative exponent repeats the inverse.
inline BraidWord parse_braid_word(std::string_view text, int strand_count) {
  detail::require(strand_count >= 1, ErrorCode::invalid_argument,
                  "strand count must be at least 1");
  return {strand_count, detail::BraidParser(text, strand_count).parse()};
}

/// Letter-by-letter rendering; parse_braid_word inverts it exactly.
inline std::string to_string(const BraidWord& word) {
  std::string out;
  for (const Letter& l : word.letters()) {
    if (!out.empty()) out += ' ';
    out += 's' + std::to_string(l.generator);
    if (l.sign < 0) out += "^-1";
  }
  return out;
}

/// The torus knot/link T(p, q) as (s1 s2 ... s_{p-1})^q on p strands.
inline BraidWord torus_braid(int p, int q) {
  detail::require(p >= 1, ErrorCode::invalid_argument, "torus strand count must be >= 1");
  std::vector<Letter> letters;
  const int reps = q < 0 ? -q : q;
  for (int r = 0; r < reps; ++r)
    for (int i = 1; i < p; ++i) letters.push_back({i, 1});
  BraidWord w(p, std::move(letters));
  return q < 0 ? w.inverse() : w;
}

struct ClosurePartition {
  std::vector<int> permutation;
  /// Each component lists its strands (0-based top positions), ascending.
  std::vector<std::vector<int>> components;
  std::vector<int> component_of_strand;

  std::size_t count() const noexcept { return components.size(); }
};

/// Components of the braid closure, numbered by their smallest strand.
inline ClosurePartition closure_components(const BraidWord& word) {
  ClosurePartition out;
  out.permutation = word.permutation();
  const auto n = out.permutation.size();
  out.component_of_strand.assign(n, -1);
  for (std::size_t s = 0; s < n; ++s) {
    if (out.component_of_strand[s] >= 0) continue;
    const int id = static_cast<int>(out.components.size());
    std::vector<int> cycle;
    for (auto t = s; out.component_of_strand[t] < 0;
         t = static_cast<std::size_t>(out.permutation[t])) {
      out.component_of_strand[t] = id;
      cycle.push_back(static_cast<int>(t));
    }
    std::sort(cycle.begin(), cycle.end());
    out.components.push_back(std::move(cycle));
  }
  return out;
}

/// Linking matrix of the closure with the given framings on the diagonal.
inline IntMatrix linking_matrix_from_braid(const BraidWord& word,
                                           std::span<const std::int64_t> framings) {
  const auto closure = closure_components(word);
  detail::require(framings.size() == closure.count(), ErrorCode::component_count_mismatch,
                  "closure has " + std::to_string(closure.count()) +
                      " components but " + std::to_string(framings.size()) +
                      " framings were given");
  IntMatrix crossings(closure.count());
  auto at = word.strand_at(0);
  for (const Letter& l : word.letters()) {
    const auto g = static_cast<std::size_t>(l.generator);
    const int a = closure.component_of_strand[static_cast<std::size_t>(at[g - 1])];
    const int b = closure.component_of_strand[static_cast<std::size_t>(at[g])];
    if (a != b) {
      crossings(static_cast<std::size_t>(a), static_cast<std::size_t>(b)) += l.sign;
      crossings(static_cast<std::size_t>(b), static_cast<std::size_t>(a)) += l.sign;
    }
    std::swap(at[g - 1], at[g]);
  }
  IntMatrix lk(closure.count());
  for (std::size_t i = 0; i < lk.size(); ++i) {
    for (std::size_t j = 0; j < lk.size(); ++j) {
      if (i == j) {
        lk(i, i) = framings[i];
        continue;
      }
      detail::require(crossings(i, j) % 2 == 0, ErrorCode::internal,
                      "odd inter-component crossing count in a braid closure");
      lk(i, j) = crossings(i, j) / 2;
    }
  }
  return lk;
}

/// Insertion point inside a letter sequence: before letter `index`.
struct InsertPosition {
  enum class Kind { start, end, index };
  Kind kind = Kind::end;
  std::size_t index = 0;

  static InsertPosition at_start() { return {Kind::start, 0}; }
  static InsertPosition at_end() { return {Kind::end, 0}; }
  static InsertPosition at(std::size_t i) { return {Kind::index, i}; }

  std::size_t resolve(std::size_t length) const {
    switch (kind) {
      case Kind::start: return 0;
      case Kind::end: return length;
      case Kind::index: return index;
    }
    return length;
  }

  friend bool operator==(const InsertPosition&, const InsertPosition&) = default;
};

enum class TwistForm { forward, reversed };

/// A run of adjacent strand positions [first, last] (1-based) at a point of
/// the word. Inside a braid all captured strands are coherently oriented.
struct TwistLocus {
  int first = 1;
  int last = 1;
  InsertPosition position;
  TwistForm form = TwistForm::forward;

  int width() const noexcept { return last - first + 1; }
  friend bool operator==(const TwistLocus&, const TwistLocus&) = default;
};

inline void validate_locus(const BraidWord& word, const TwistLocus& locus) {
  detail::require(locus.first >= 1 && locus.first <= locus.last &&
                      locus.last <= word.strand_count(),
                  ErrorCode::invalid_locus,
                  "strand interval " + std::to_string(locus.first) + ".." +
                      std::to_string(locus.last) + " outside [1," +
                      std::to_string(word.strand_count()) + "]");
  detail::require(locus.position.kind != InsertPosition::Kind::index ||
                      locus.position.index <= word.size(),
                  ErrorCode::invalid_locus,
                  "insertion index " + std::to_string(locus.position.index) +
                      " beyond word length " + std::to_string(word.size()));
}

/// How many strands of each closure component pass through the locus.
inline std::vector<std::int64_t> captured_strand_counts(const BraidWord& word,
                                                        const TwistLocus& locus) {
  validate_locus(word, locus);
  const auto closure = closure_components(word);
  const auto at = word.strand_at(locus.position.resolve(word.size()));
  std::vector<std::int64_t> counts(closure.count(), 0);
  for (int q = locus.first - 1; q < locus.last; ++q)
    ++counts[static_cast<std::size_t>(
        closure.component_of_strand[static_cast<std::size_t>(at[static_cast<std::size_t>(q)])])];
  return counts;
}

/// The full twist on the locus strands, (s_a ... s_{b-1})^(b-a+1) or its
/// reversed-generator form, raised to `sign`.
inline std::vector<Letter> full_twist_letters(const TwistLocus& locus, int sign) {
  std::vector<Letter> unit;
  if (locus.form == TwistForm::forward) {
    for (int i = locus.first; i < locus.last; ++i) unit.push_back({i, 1});
  } else {
    for (int i = locus.last - 1; i >= locus.first; --i) unit.push_back({i, 1});
  }
  if (sign < 0) {
    std::reverse(unit.begin(), unit.end());
    for (auto& l : unit) l.sign = -1;
  }
  std::vector<Letter> out;
  for (int r = 0; r < locus.width(); ++r) out.insert(out.end(), unit.begin(), unit.end());
  return out;
}

inline BraidWord insert_full_twist(const BraidWord& word, const TwistLocus& locus, int sign) {
  validate_locus(word, locus);
  detail::require(sign == 1 || sign == -1, ErrorCode::invalid_argument, "twist sign must be +1 or -1");
  const auto twist = full_twist_letters(locus, sign);
  auto letters = word.letters();
  const auto at = static_cast<std::ptrdiff_t>(locus.position.resolve(word.size()));
  letters.insert(letters.begin() + at, twist.begin(), twist.end());
  return {word.strand_count(), std::move(letters)};
}

enum class UnknotStatus { verified_unknot, unknown };

struct Simplification {
  BraidWord word;
  UnknotStatus status = UnknotStatus::unknown;
};

namespace detail {

// Cancels a letter against a later inverse reachable through commuting
// letters, reading the word cyclically (closures are conjugation invariant).
inline bool cancel_once(std::vector<int>& w) {
  const std::size_t n = w.size();
  for (std::size_t i = 0; i < n; ++i) {
    const int g = std::abs(w[i]);
    for (std::size_t step = 1; step < n; ++step) {
      const std::size_t j = (i + step) % n;
      if (w[j] == -w[i]) {
        const std::size_t hi = std::max(i, j), lo = std::min(i, j);
        w.erase(w.begin() + static_cast<std::ptrdiff_t>(hi));
        w.erase(w.begin() + static_cast<std::ptrdiff_t>(lo));
        return true;
      }
      if (std::abs(std::abs(w[j]) - g) < 2) break;
    }
  }
  return false;
}

// Markov destabilization on a generator occurring exactly once, when it is
// the top or bottom index of the braid.
inline bool destabilize_once(std::vector<int>& w, int& strands) {
  if (strands <= 1) return false;
  for (const int g : {strands - 1, 1}) {
    std::size_t count = 0, where = 0;
    for (std::size_t i = 0; i < w.size(); ++i)
      if (std::abs(w[i]) == g) {
        ++count;
        where = i;
      }
    if (count != 1) continue;
    std::vector<int> rotated(w.begin() + static_cast<std::ptrdiff_t>(where) + 1, w.end());
    rotated.insert(rotated.end(), w.begin(), w.begin() + static_cast<std::ptrdiff_t>(where));
    if (g == 1 && strands > 2) {
      for (int& x : rotated) x += x > 0 ? -1 : 1;
    }
    w = std::move(rotated);
    --strands;
    return true;
  }
  return false;
}

}  // namespace detail

/// Best-effort unknot certificate: cyclic free reduction through distant
/// commutations plus Markov destabilization, iterated to a fixed point.
/// `unknown` never means knotted.
inline Simplification simplify_and_detect_unknot(const BraidWord& word) {
  detail::require(closure_components(word).count() == 1, ErrorCode::multi_component,
                  "unknot detection needs a one-component closure");
  std::vector<int> w;
  for (const Letter& l : word.letters()) w.push_back(l.sign * l.generator);
  int strands = word.strand_count();
  while (detail::cancel_once(w) || detail::destabilize_once(w, strands)) {
  }
  std::vector<Letter> letters;
  for (int x : w) letters.push_back({std::abs(x), x > 0 ? 1 : -1});
  Simplification out{BraidWord(strands, std::move(letters)), UnknotStatus::unknown};
  if (strands == 1 && out.word.empty()) out.status = UnknotStatus::verified_unknot;
  return out;
}

}  // namespace kslice
