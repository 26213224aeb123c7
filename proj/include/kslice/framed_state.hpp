#pragma once

#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kslice/error.hpp"
#include "kslice/gf2.hpp"
#include "kslice/matrix.hpp"
#include "kslice/signature.hpp"

namespace kslice {

enum class UnknotKnowledge { verified, asserted, unknown };
enum class Origin { initial_knot, blowup_circle, slide_result, replacement };
enum class Mode { full, reduced };

constexpr std::string_view to_string(UnknotKnowledge u) {
  switch (u) {
    case UnknotKnowledge::verified: return "verified";
    case UnknotKnowledge::asserted: return "asserted";
    case UnknotKnowledge::unknown: return "unknown";
  }
  return "unknown";
}

constexpr std::string_view to_string(Origin o) {
  switch (o) {
    case Origin::initial_knot: return "initial_knot";
    case Origin::blowup_circle: return "blowup_circle";
    case Origin::slide_result: return "slide_result";
    case Origin::replacement: return "replacement";
  }
  return "initial_knot";
}

constexpr std::string_view to_string(Mode m) { return m == Mode::full ? "full" : "reduced"; }

struct Component {
  std::string id;
  bool characteristic = false;
  UnknotKnowledge unknot = UnknotKnowledge::unknown;
  Origin origin = Origin::initial_knot;
  /// Set while this circle is an untouched meridian of that component.
  std::string meridian_of;
  /// Components this one geometrically encircles (blow-up circles only).
  std::vector<std::string> touches;

  friend bool operator==(const Component&, const Component&) = default;
};

/// Framed link with its characteristic sublink and the (b2, sigma) counters
/// of the ambient 2-handlebody. Framings live on the linking diagonal.
struct FramedLinkState {
  std::vector<Component> components;
  IntMatrix linking;
  std::int64_t b2 = 0;
  std::int64_t sigma = 0;
  Mode mode = Mode::full;

  std::size_t size() const noexcept { return components.size(); }

  std::optional<std::size_t> find(std::string_view id) const {
    for (std::size_t i = 0; i < components.size(); ++i)
      if (components[i].id == id) return i;
    return std::nullopt;
  }

  std::size_t index_of(std::string_view id) const {
    auto i = find(id);
    if (!i) detail::fail(ErrorCode::unknown_component, "no live component '" + std::string(id) + "'");
    return *i;
  }

  std::int64_t framing(std::size_t i) const { return linking(i, i); }

  std::vector<bool> mask() const {
    std::vector<bool> m(components.size());
    for (std::size_t i = 0; i < components.size(); ++i) m[i] = components[i].characteristic;
    return m;
  }

  std::vector<std::size_t> characteristic_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < components.size(); ++i)
      if (components[i].characteristic) out.push_back(i);
    return out;
  }

  friend bool operator==(const FramedLinkState&, const FramedLinkState&) = default;
};

/// Throws corrupted_state if any tracked invariant fails. The signature
/// recomputation is the expensive part and can be skipped.
inline void check_invariants(const FramedLinkState& s, bool recompute_signature = true) {
  const auto fail = [](const std::string& what) { detail::fail(ErrorCode::corrupted_state, what); };
  if (s.linking.size() != s.components.size()) fail("linking matrix size differs from component count");
  if (!s.linking.is_symmetric()) fail("linking matrix is not symmetric");
  if (!is_characteristic(s.linking, s.mask())) fail("characteristic mask violates the mod 2 congruence");
  if (s.mode == Mode::full) {
    if (s.b2 != static_cast<std::int64_t>(s.components.size()))
      fail("full mode: b2 = " + std::to_string(s.b2) + " but " +
           std::to_string(s.components.size()) + " components");
    if (recompute_signature) {
      const int sig = exact_signature(s.linking);
      if (sig != s.sigma)
        fail("full mode: tracked sigma " + std::to_string(s.sigma) +
             " differs from exact signature " + std::to_string(sig));
    }
  } else {
    if (s.b2 < static_cast<std::int64_t>(s.components.size())) fail("reduced mode: b2 below component count");
    if (std::llabs(s.sigma) > s.b2) fail("reduced mode: |sigma| exceeds b2");
  }
}

/// Spin iff the tracked characteristic sublink is empty. In full mode an
/// empty mask must come with an even linking matrix.
inline bool is_spin(const FramedLinkState& s) {
  const bool empty = s.characteristic_indices().empty();
  if (empty && s.mode == Mode::full) {
    for (std::size_t i = 0; i < s.size(); ++i)
      if (s.framing(i) % 2 != 0)
        detail::fail(ErrorCode::corrupted_state,
                     "empty characteristic mask but component '" + s.components[i].id +
                         "' has odd framing");
  }
  return empty;
}

enum class Verdict { not_smoothly_slice, inconclusive };
enum class ArfConsistency { consistent, inconsistent, unchecked };

constexpr std::string_view to_string(Verdict v) {
  return v == Verdict::not_smoothly_slice ? "not_smoothly_slice" : "inconclusive";
}
constexpr std::string_view to_string(ArfConsistency a) {
  switch (a) {
    case ArfConsistency::consistent: return "consistent";
    case ArfConsistency::inconsistent: return "inconsistent";
    case ArfConsistency::unchecked: return "unchecked";
  }
  return "unchecked";
}

/// An unverified claim made during a derivation. Claims about a certified
/// braid presentation are trust points; claims that only realize a declared
/// (non-braid) move are declarations.
struct Assertion {
  enum class Kind { isotopy, unknot, declared_blowup, declared_presentation };
  Kind kind = Kind::isotopy;
  std::string component;
  std::string detail;

  bool is_trust_point() const { return kind == Kind::isotopy || kind == Kind::unknot; }
  friend bool operator==(const Assertion&, const Assertion&) = default;
};

constexpr std::string_view to_string(Assertion::Kind k) {
  switch (k) {
    case Assertion::Kind::isotopy: return "isotopy";
    case Assertion::Kind::unknot: return "unknot";
    case Assertion::Kind::declared_blowup: return "declared_blowup";
    case Assertion::Kind::declared_presentation: return "declared_presentation";
  }
  return "isotopy";
}

inline std::int64_t obstruction_margin(std::int64_t b2, std::int64_t sigma) {
  return 4 * b2 - 5 * std::llabs(sigma) - 12;
}

struct ObstructionReport {
  std::int64_t b2 = 0;
  std::int64_t sigma = 0;
  std::int64_t margin = 0;
  Verdict verdict = Verdict::inconclusive;
  std::string spin_structure = "s1";
  std::vector<Assertion> trust_points;
  std::vector<Assertion> declarations;
  ArfConsistency arf_consistency = ArfConsistency::unchecked;
  std::optional<int> arf;
  std::vector<std::string> warnings;

  friend bool operator==(const ObstructionReport&, const ObstructionReport&) = default;
};

/// Either b2 = 1 or 4 b2 >= 5 |sigma| + 12 for a slice knot; a violation
/// with b2 != 1 certifies non-sliceness.
inline ObstructionReport obstruction_verdict(std::int64_t b2, std::int64_t sigma) {
  detail::require(b2 >= 0, ErrorCode::invalid_argument, "b2 must be nonnegative");
  ObstructionReport r;
  r.b2 = b2;
  r.sigma = sigma;
  r.margin = obstruction_margin(b2, sigma);
  r.verdict = (b2 != 1 && r.margin < 0) ? Verdict::not_smoothly_slice : Verdict::inconclusive;
  if (b2 == 0) {
    r.verdict = Verdict::inconclusive;
    r.warnings.push_back("b2 = 0 cannot bound 0-surgery on a knot; state is malformed");
  }
  return r;
}

/// sigma must be 8 Arf(K) mod 16 for a spin filling of (S^3_0(K), s1).
inline ArfConsistency arf_consistency(std::int64_t sigma, int arf) {
  const std::int64_t r16 = ((sigma % 16) + 16) % 16;
  if (sigma % 8 != 0) return ArfConsistency::inconsistent;
  return r16 == 8 * arf ? ArfConsistency::consistent : ArfConsistency::inconsistent;
}

inline ArfConsistency arf_consistency(const ObstructionReport& report, int arf) {
  return arf_consistency(report.sigma, arf);
}

/// b2 = b2_1 + b2_2 + 1, sigma = sigma_1 + sigma_2 for K1 # K2.
inline ObstructionReport connected_sum(const ObstructionReport& a, const ObstructionReport& b) {
  auto r = obstruction_verdict(a.b2 + b.b2 + 1, a.sigma + b.sigma);
  r.trust_points = a.trust_points;
  r.trust_points.insert(r.trust_points.end(), b.trust_points.begin(), b.trust_points.end());
  r.declarations = a.declarations;
  r.declarations.insert(r.declarations.end(), b.declarations.begin(), b.declarations.end());
  if (a.arf && b.arf) {
    r.arf = (*a.arf + *b.arf) % 2;
    r.arf_consistency = arf_consistency(r.sigma, *r.arf);
  }
  return r;
}

}  // namespace kslice
