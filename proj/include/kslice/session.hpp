#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "kslice/braid.hpp"
#include "kslice/error.hpp"
#include "kslice/framed_state.hpp"
#include "kslice/invariants.hpp"

namespace kslice {

/// A braid presentation of one link component. A stale piece no longer
/// certifies the geometry of its component (a declared move touched it).
struct Piece {
  std::string id;
  BraidWord word;
  bool stale = false;
  std::string component;

  friend bool operator==(const Piece&, const Piece&) = default;
};

struct SessionState {
  std::vector<Piece> pieces;
  FramedLinkState framed;
  std::vector<Assertion> assertions;
  std::vector<std::string> warnings;
  int next_circle = 1;
  /// Arf invariant of the knot whose 0-surgery is the boundary, when known.
  std::optional<int> knot_arf;
  std::optional<ObstructionReport> report;

  const Piece* find_piece(std::string_view id) const {
    for (const auto& p : pieces)
      if (p.id == id) return &p;
    return nullptr;
  }
  Piece* piece_of_component(std::string_view component) {
    for (auto& p : pieces)
      if (p.component == component) return &p;
    return nullptr;
  }
  const Piece* piece_of_component(std::string_view component) const {
    for (const auto& p : pieces)
      if (p.component == component) return &p;
    return nullptr;
  }

  friend bool operator==(const SessionState&, const SessionState&) = default;
};

// Moves ---------------------------------------------------------------------

struct BlowUpCoherent {
  int sign = -1;
  std::string piece;
  TwistLocus locus;
  friend bool operator==(const BlowUpCoherent&, const BlowUpCoherent&) = default;
};
struct BlowUpDeclared {
  int sign = -1;
  std::vector<std::pair<std::string, std::int64_t>> linking;
  friend bool operator==(const BlowUpDeclared&, const BlowUpDeclared&) = default;
};
struct BlowUpMeridian {
  int sign = 1;
  std::string component;
  int times = 1;
  friend bool operator==(const BlowUpMeridian&, const BlowUpMeridian&) = default;
};
struct BlowDown {
  std::string component;
  friend bool operator==(const BlowDown&, const BlowDown&) = default;
};
struct SlideAbstract {
  std::string moving;
  std::string over;
  int orientation = 1;
  friend bool operator==(const SlideAbstract&, const SlideAbstract&) = default;
};
struct ReplacePieceAsserted {
  std::string component;
  BraidWord word;
  std::int64_t framing = 0;
  std::string label;
  friend bool operator==(const ReplacePieceAsserted&, const ReplacePieceAsserted&) = default;
};
struct AssertUnknot {
  std::string component;
  friend bool operator==(const AssertUnknot&, const AssertUnknot&) = default;
};
struct Endgame {
  friend bool operator==(const Endgame&, const Endgame&) = default;
};
struct ConnectedSum {
  std::string source;  // script path the summand came from
  ObstructionReport summand;
  friend bool operator==(const ConnectedSum&, const ConnectedSum&) = default;
};

using Move = std::variant<BlowUpCoherent, BlowUpDeclared, BlowUpMeridian, BlowDown, SlideAbstract,
                          ReplacePieceAsserted, AssertUnknot, Endgame, ConnectedSum>;

struct EngineOptions {
  /// Recompute the exact signature after every full-mode move.
  bool verify_signature = true;
  /// Compute Arf(K) for the report's consistency check.
  bool arf_check = true;
};

// Digest ---------------------------------------------------------------------

namespace detail {

inline void digest_field(std::string& out, std::string_view s) {
  out += std::to_string(s.size());
  out += ':';
  out += s;
  out += ';';
}

}  // namespace detail

/// Canonical byte string of a state; equal states give equal strings.
inline std::string canonical_form(const SessionState& s) {
  std::string out;
  const auto& f = s.framed;
  detail::digest_field(out, to_string(f.mode));
  detail::digest_field(out, std::to_string(f.b2) + "," + std::to_string(f.sigma));
  for (const auto& c : f.components) {
    std::string rec = c.id + "|" + (c.characteristic ? "1" : "0") + "|" +
                      std::string(to_string(c.unknot)) + "|" + std::string(to_string(c.origin)) +
                      "|" + c.meridian_of + "|";
    for (const auto& t : c.touches) rec += t + ",";
    detail::digest_field(out, rec);
  }
  detail::digest_field(out, to_string(f.linking));
  for (const auto& p : s.pieces)
    detail::digest_field(out, p.id + "|" + p.component + "|" + (p.stale ? "1" : "0") + "|" +
                                  std::to_string(p.word.strand_count()) + "|" + to_string(p.word));
  for (const auto& a : s.assertions)
    detail::digest_field(out, std::string(to_string(a.kind)) + "|" + a.component + "|" + a.detail);
  detail::digest_field(out, std::to_string(s.next_circle));
  detail::digest_field(out, s.knot_arf ? std::to_string(*s.knot_arf) : "-");
  return out;
}

/// 64-bit FNV-1a of the canonical form, as 16 hex digits.
inline std::string state_digest(const SessionState& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : canonical_form(s)) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Initial states ---------------------------------------------------------------

inline UnknotKnowledge detect_unknot(const BraidWord& word) {
  return simplify_and_detect_unknot(word).status == UnknotStatus::verified_unknot
             ? UnknotKnowledge::verified
             : UnknotKnowledge::unknown;
}

/// One 0-framed characteristic 2-handle along the closure of `word`.
inline SessionState init_from_knot(const BraidWord& word, const EngineOptions& options = {}) {
  require_knot(word);
  SessionState s;
  s.framed.components.push_back({"K", true, detect_unknot(word), Origin::initial_knot, {}, {}});
  s.framed.linking = IntMatrix(1);
  s.framed.b2 = 1;
  s.framed.sigma = 0;
  s.framed.mode = Mode::full;
  s.pieces.push_back({"K", word, false, "K"});
  if (options.arf_check) s.knot_arf = arf(word);
  return s;
}

struct PieceDeclaration {
  std::string id;
  std::optional<BraidWord> word;  // empty = unknot
  std::int64_t framing = 0;
  bool characteristic = false;
  friend bool operator==(const PieceDeclaration&, const PieceDeclaration&) = default;
};

struct Counters {
  std::int64_t b2 = 0;
  std::int64_t sigma = 0;
  friend bool operator==(const Counters&, const Counters&) = default;
};

/// Pairwise split pieces. With counters the state is in reduced mode: only
/// the listed components are retained and (b2, sigma) are taken as given.
inline SessionState init_from_pieces(const std::vector<PieceDeclaration>& decls,
                                     const std::optional<Counters>& counters) {
  detail::require(!decls.empty(), ErrorCode::invalid_argument, "at least one piece is required");
  SessionState s;
  std::vector<std::int64_t> diag;
  for (const auto& d : decls) {
    detail::require(!s.framed.find(d.id), ErrorCode::invalid_argument, "duplicate piece id '" + d.id + "'");
    const BraidWord word = d.word.value_or(BraidWord(1, {}));
    require_knot(word);
    s.framed.components.push_back({d.id, d.characteristic, detect_unknot(word), Origin::initial_knot, {}, {}});
    s.pieces.push_back({d.id, word, false, d.id});
    diag.push_back(d.framing);
  }
  s.framed.linking = IntMatrix::diagonal(diag);
  detail::require(is_characteristic(s.framed.linking, s.framed.mask()), ErrorCode::invalid_argument,
                  "declared characteristic flags violate the mod 2 congruence");
  if (counters) {
    s.framed.mode = Mode::reduced;
    s.framed.b2 = counters->b2;
    s.framed.sigma = counters->sigma;
  } else {
    s.framed.mode = Mode::full;
    s.framed.b2 = static_cast<std::int64_t>(decls.size());
    s.framed.sigma = exact_signature(s.framed.linking);
  }
  check_invariants(s.framed);
  return s;
}

// Move primitives ---------------------------------------------------------------

namespace detail {

inline void mark_touched(SessionState& s, std::size_t i) {
  auto& c = s.framed.components[i];
  if (c.unknot != UnknotKnowledge::unknown) c.unknot = UnknotKnowledge::unknown;
  if (auto* p = s.piece_of_component(c.id)) p->stale = true;
}

// Adds an eps-framed circle with linking vector p; returns its index.
inline std::size_t add_blowup_circle(SessionState& s, int eps, const std::vector<std::int64_t>& p,
                                     std::vector<std::string> touches) {
  auto& f = s.framed;
  const std::size_t n = f.size();
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < n; ++i)
    if (p[i] != 0) support.push_back(i);
  for (std::size_t i : support)
    for (std::size_t j : support) f.linking(i, j) += eps * p[i] * p[j];
  std::int64_t char_total = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (f.components[i].characteristic) char_total += p[i];
  f.linking.append(p, eps);
  Component circle;
  circle.id = "c" + std::to_string(s.next_circle++);
  circle.characteristic = char_total % 2 == 0;
  circle.unknot = UnknotKnowledge::verified;
  circle.origin = Origin::blowup_circle;
  circle.touches = std::move(touches);
  f.components.push_back(std::move(circle));
  f.b2 += 1;
  f.sigma += eps;
  return n;
}

inline void require_sign(int sign) {
  require(sign == 1 || sign == -1, ErrorCode::invalid_argument, "sign must be + or -");
}

}  // namespace detail

/// Blow-up across a coherent run of strands in a live braid piece: the word
/// gains a full twist of sign eps and each captured component's framing
/// moves by eps * p^2.
inline SessionState blow_up_coherent(SessionState s, int eps, const std::string& piece_id,
                                     const TwistLocus& locus) {
  detail::require_sign(eps);
  const Piece* found = s.find_piece(piece_id);
  if (!found) detail::fail(ErrorCode::unknown_piece, "no piece '" + piece_id + "'");
  detail::require(!found->stale, ErrorCode::stale_piece,
                  "piece '" + piece_id + "' is stale; replace it before a coherent blow-up");
  const auto captured = captured_strand_counts(found->word, locus);
  const std::string component = found->component;
  const std::size_t ci = s.framed.index_of(component);
  std::vector<std::int64_t> p(s.framed.size(), 0);
  p[ci] = captured[0];
  detail::add_blowup_circle(s, eps, p, {component});
  Piece* piece = s.piece_of_component(component);
  piece->word = insert_full_twist(piece->word, locus, eps);
  s.framed.components[ci].unknot = detect_unknot(piece->word);
  s.framed.components[ci].meridian_of.clear();
  return s;
}

/// Blow-up along a user-declared curve with the given linking numbers
/// (unlisted components: 0). Listed components lose their certified braid.
inline SessionState blow_up_declared(SessionState s, int eps,
                                     const std::vector<std::pair<std::string, std::int64_t>>& linking) {
  detail::require_sign(eps);
  std::vector<std::int64_t> p(s.framed.size(), 0);
  std::vector<std::string> touches;
  for (const auto& [id, lk] : linking) {
    const std::size_t i = s.framed.index_of(id);
    p[i] = lk;
    touches.push_back(id);
  }
  std::string detail = "linking {";
  for (std::size_t k = 0; k < linking.size(); ++k)
    detail += (k ? ", " : "") + linking[k].first + ": " + std::to_string(linking[k].second);
  detail += "}";
  for (const auto& id : touches) detail::mark_touched(s, s.framed.index_of(id));
  const std::size_t circle = detail::add_blowup_circle(s, eps, p, touches);
  s.assertions.push_back({Assertion::Kind::declared_blowup, s.framed.components[circle].id,
                          std::string(eps > 0 ? "+" : "-") + " " + detail});
  return s;
}

/// `times` blow-ups along meridians of one component, each changing its
/// framing by eps.
inline SessionState blow_up_meridian(SessionState s, int eps, const std::string& component, int times) {
  detail::require_sign(eps);
  detail::require(times >= 1, ErrorCode::invalid_argument, "meridian repeat count must be positive");
  const std::size_t c = s.framed.index_of(component);
  if (!s.framed.components[c].characteristic)
    s.warnings.push_back("meridian of non-characteristic component '" + component +
                         "' joins the characteristic link");
  for (int t = 0; t < times; ++t) {
    std::vector<std::int64_t> p(s.framed.size(), 0);
    p[c] = 1;
    const std::size_t m = detail::add_blowup_circle(s, eps, p, {component});
    s.framed.components[m].meridian_of = component;
  }
  return s;
}

/// Removes a +-1 framed unknot u, with lk(i,j) -= eps lk(u,i) lk(u,j).
inline SessionState blow_down(SessionState s, const std::string& component) {
  auto& f = s.framed;
  const std::size_t u = f.index_of(component);
  const std::int64_t eps = f.framing(u);
  detail::require(eps == 1 || eps == -1, ErrorCode::framing_not_unit,
                  "cannot blow down '" + component + "': framing " + std::to_string(eps) + " is not +-1");
  detail::require(f.components[u].unknot != UnknotKnowledge::unknown, ErrorCode::unknot_unverified,
                  "cannot blow down '" + component + "': not known to be an unknot");

  const Component removed = f.components[u];
  std::vector<std::size_t> affected;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i == u) continue;
    const auto& ci = f.components[i];
    const bool geometric = f.linking(u, i) != 0 ||
                           std::find(removed.touches.begin(), removed.touches.end(), ci.id) != removed.touches.end() ||
                           std::find(ci.touches.begin(), ci.touches.end(), removed.id) != ci.touches.end();
    if (!geometric) continue;
    // a meridian passes once through the other's spanning disk: knot type kept
    if (removed.meridian_of == ci.id || ci.meridian_of == removed.id) continue;
    affected.push_back(i);
  }
  const std::size_t n = f.size();
  IntMatrix next = f.linking;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) next(i, j) -= eps * f.linking(u, i) * f.linking(u, j);
  next.erase(u);
  for (std::size_t i : affected) detail::mark_touched(s, i);
  f.linking = std::move(next);
  f.components.erase(f.components.begin() + static_cast<std::ptrdiff_t>(u));
  for (auto& c : f.components) {
    std::erase(c.touches, removed.id);
    if (c.meridian_of == removed.id) c.meridian_of.clear();
  }
  std::erase_if(s.pieces, [&](const Piece& p) { return p.component == removed.id; });
  f.b2 -= 1;
  f.sigma -= eps;
  return s;
}

/// Handle slide of `moving` over `over` with band orientation eta: the basis
/// change e_i <- e_i + eta e_j, and the mask transported in that basis.
inline SessionState slide_abstract(SessionState s, const std::string& moving, const std::string& over, int eta) {
  detail::require_sign(eta);
  auto& f = s.framed;
  const std::size_t i = f.index_of(moving);
  const std::size_t j = f.index_of(over);
  detail::require(i != j, ErrorCode::invalid_argument, "cannot slide a component over itself");
  const std::size_t n = f.size();
  std::vector<std::int64_t> row(n);
  for (std::size_t k = 0; k < n; ++k) row[k] = f.linking(i, k) + eta * f.linking(j, k);
  row[i] = f.linking(i, i) + f.linking(j, j) + 2 * eta * f.linking(i, j);
  for (std::size_t k = 0; k < n; ++k) {
    f.linking(i, k) = row[k];
    f.linking(k, i) = row[k];
  }
  // coordinates in the new basis: x'_j = x_j + x_i (mod 2)
  if (f.components[i].characteristic) f.components[j].characteristic = !f.components[j].characteristic;

  auto& ci = f.components[i];
  const auto& cj = f.components[j];
  ci.origin = Origin::slide_result;
  ci.meridian_of.clear();
  for (const auto& t : cj.touches)
    if (t != ci.id && std::find(ci.touches.begin(), ci.touches.end(), t) == ci.touches.end())
      ci.touches.push_back(t);
  for (auto& c : f.components)
    if (c.id != ci.id && std::find(c.touches.begin(), c.touches.end(), cj.id) != c.touches.end() &&
        std::find(c.touches.begin(), c.touches.end(), ci.id) == c.touches.end())
      c.touches.push_back(ci.id);
  detail::mark_touched(s, i);
  return s;
}

/// Swaps the braid presentation of one component. Replacing a certified
/// braid is an isotopy claim: the Alexander polynomials must agree and the
/// claim becomes a trust point unless both sides are verified unknots.
inline SessionState replace_piece_asserted(SessionState s, const std::string& component, const BraidWord& word,
                                           std::int64_t framing, const std::string& label = {}) {
  const std::size_t c = s.framed.index_of(component);
  detail::require(closure_components(word).count() == 1, ErrorCode::component_count_mismatch,
                  "replacement closure must have exactly one component");
  detail::require(s.framed.framing(c) == framing, ErrorCode::framing_mismatch,
                  "replacement framing " + std::to_string(framing) + " differs from current framing " +
                      std::to_string(s.framed.framing(c)) + " of '" + component + "'");
  const auto new_status = detect_unknot(word);
  auto& comp = s.framed.components[c];
  Piece* piece = s.piece_of_component(component);
  const bool certified = piece && !piece->stale;
  const std::string detail =
      label.empty() ? component + " -> " + std::to_string(word.strand_count()) + " \"" + to_string(word) + "\""
                    : label;
  const bool both_unknots = comp.unknot == UnknotKnowledge::verified && new_status == UnknotKnowledge::verified;
  if (certified) {
    const auto before = alexander_polynomial(piece->word);
    const auto after = alexander_polynomial(word);
    detail::require(before == after, ErrorCode::not_isotopic,
                    "replacement changes the Alexander polynomial of '" + component + "' (" + to_string(before) +
                        " vs " + to_string(after) + ")");
    if (!both_unknots) s.assertions.push_back({Assertion::Kind::isotopy, component, detail});
  } else if (!both_unknots) {
    s.assertions.push_back({Assertion::Kind::declared_presentation, component, detail});
  }
  if (piece) {
    piece->word = word;
    piece->stale = false;
  } else {
    s.pieces.push_back({component, word, false, component});
  }
  comp.unknot = new_status;
  comp.origin = Origin::replacement;
  return s;
}

/// Records that a component is an unknot. Certified braids are checked
/// first; a failed check makes the claim a trust point.
inline SessionState assert_unknot(SessionState s, const std::string& component) {
  const std::size_t c = s.framed.index_of(component);
  auto& comp = s.framed.components[c];
  if (comp.unknot == UnknotKnowledge::verified) return s;
  const Piece* piece = s.piece_of_component(component);
  if (piece && !piece->stale) {
    if (detect_unknot(piece->word) == UnknotKnowledge::verified) {
      comp.unknot = UnknotKnowledge::verified;
      return s;
    }
    s.assertions.push_back({Assertion::Kind::unknot, component, "unknot: " + component});
  } else {
    s.assertions.push_back({Assertion::Kind::declared_presentation, component, "unknot: " + component});
  }
  comp.unknot = UnknotKnowledge::asserted;
  return s;
}

/// Report for a spin state.
inline ObstructionReport make_report(const SessionState& s) {
  detail::require(is_spin(s.framed), ErrorCode::not_spin,
                  "characteristic link is not empty; the state is not spin");
  auto r = obstruction_verdict(s.framed.b2, s.framed.sigma);
  for (const auto& a : s.assertions) (a.is_trust_point() ? r.trust_points : r.declarations).push_back(a);
  if (s.knot_arf) {
    r.arf = s.knot_arf;
    r.arf_consistency = arf_consistency(r.sigma, *s.knot_arf);
  }
  r.warnings.insert(r.warnings.end(), s.warnings.begin(), s.warnings.end());
  return r;
}

/// Drives every characteristic unknot to framing +-1 by meridian blow-ups of
/// the opposite sign (f = 0 uses +1), then blows it down.
inline SessionState endgame(SessionState s) {
  const auto chars = s.framed.characteristic_indices();
  for (std::size_t a = 0; a < chars.size(); ++a) {
    const auto& ca = s.framed.components[chars[a]];
    detail::require(ca.unknot != UnknotKnowledge::unknown, ErrorCode::unknot_unverified,
                    "characteristic component '" + ca.id + "' is not known to be an unknot");
    for (std::size_t b = a + 1; b < chars.size(); ++b)
      detail::require(s.framed.linking(chars[a], chars[b]) == 0, ErrorCode::non_split_characteristic,
                      "characteristic components '" + ca.id + "' and '" + s.framed.components[chars[b]].id +
                          "' link each other");
  }
  std::vector<std::string> ids;
  for (std::size_t i : chars) ids.push_back(s.framed.components[i].id);
  // split means geometrically separated: blowing one down leaves the others alone
  for (std::size_t i : chars)
    std::erase_if(s.framed.components[i].touches,
                  [&](const std::string& t) { return std::find(ids.begin(), ids.end(), t) != ids.end(); });
  for (const auto& id : ids) {
    const std::int64_t f = s.framed.framing(s.framed.index_of(id));
    if (f < 0 && f != -1) s = blow_up_meridian(std::move(s), +1, id, static_cast<int>(-f - 1));
    if (f > 0 && f != 1) s = blow_up_meridian(std::move(s), -1, id, static_cast<int>(f - 1));
    if (f == 0) s = blow_up_meridian(std::move(s), +1, id, 1);
    s = blow_down(std::move(s), id);
  }
  s.report = make_report(s);
  return s;
}

/// Boundary connected sum with a certified summand, then the 2-handle
/// cobordism to 0-surgery on the knot sum. Only counters survive, so the
/// state drops to reduced mode.
inline SessionState connected_sum_move(SessionState s, const ConnectedSum& move) {
  const auto mine = make_report(s);
  auto combined = connected_sum(mine, move.summand);
  s.framed.mode = Mode::reduced;
  s.framed.b2 = combined.b2;
  s.framed.sigma = combined.sigma;
  for (const auto& a : move.summand.trust_points) s.assertions.push_back(a);
  for (const auto& a : move.summand.declarations) s.assertions.push_back(a);
  if (s.knot_arf && move.summand.arf) s.knot_arf = (*s.knot_arf + *move.summand.arf) % 2;
  else s.knot_arf.reset();
  s.report = make_report(s);
  return s;
}

namespace detail {

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

}  // namespace detail

inline SessionState apply_move(const SessionState& state, const Move& move,
                               const EngineOptions& options = {}) {
  SessionState next = std::visit(
      detail::overloaded{
          [&](const BlowUpCoherent& m) { return blow_up_coherent(state, m.sign, m.piece, m.locus); },
          [&](const BlowUpDeclared& m) { return blow_up_declared(state, m.sign, m.linking); },
          [&](const BlowUpMeridian& m) { return blow_up_meridian(state, m.sign, m.component, m.times); },
          [&](const BlowDown& m) { return blow_down(state, m.component); },
          [&](const SlideAbstract& m) { return slide_abstract(state, m.moving, m.over, m.orientation); },
          [&](const ReplacePieceAsserted& m) {
            return replace_piece_asserted(state, m.component, m.word, m.framing, m.label);
          },
          [&](const AssertUnknot& m) { return assert_unknot(state, m.component); },
          [&](const Endgame&) { return endgame(state); },
          [&](const ConnectedSum& m) { return connected_sum_move(state, m); },
      },
      move);
  if (!std::holds_alternative<Endgame>(move) && !std::holds_alternative<ConnectedSum>(move))
    next.report.reset();
  check_invariants(next.framed, options.verify_signature);
  return next;
}

// Session with history -----------------------------------------------------------

struct LogEntry {
  Move move;
  std::string pre_digest;
  std::int64_t delta_b2 = 0;
  std::int64_t delta_sigma = 0;
};

/// How the session began; kept so the history can be exported as a script.
struct InitialKnot {
  BraidWord word;
  std::optional<std::pair<int, int>> torus;
  friend bool operator==(const InitialKnot&, const InitialKnot&) = default;
};
struct InitialPieces {
  std::vector<PieceDeclaration> pieces;
  std::optional<Counters> counters;
  friend bool operator==(const InitialPieces&, const InitialPieces&) = default;
};
using InitialPresentation = std::variant<InitialKnot, InitialPieces>;

inline SessionState initial_state(const InitialPresentation& init, const EngineOptions& options = {}) {
  return std::visit(detail::overloaded{
                        [&](const InitialKnot& k) { return init_from_knot(k.word, options); },
                        [&](const InitialPieces& p) { return init_from_pieces(p.pieces, p.counters); },
                    },
                    init);
}

/// A derivation: initial presentation, current state and the move log.
/// Undo replays the log minus its last entry and checks the digest.
class Session {
 public:
  explicit Session(InitialPresentation init, EngineOptions options = {})
      : init_(std::move(init)), options_(options), start_(initial_state(init_, options_)), current_(start_) {}

  const InitialPresentation& initial() const noexcept { return init_; }
  const SessionState& state() const noexcept { return current_; }
  const std::vector<LogEntry>& log() const noexcept { return log_; }
  const EngineOptions& options() const noexcept { return options_; }
  std::string digest() const { return state_digest(current_); }

  const SessionState& apply(const Move& move) {
    SessionState next = apply_move(current_, move, options_);
    log_.push_back({move, state_digest(current_), next.framed.b2 - current_.framed.b2,
                    next.framed.sigma - current_.framed.sigma});
    current_ = std::move(next);
    return current_;
  }

  const SessionState& undo() {
    detail::require(!log_.empty(), ErrorCode::empty_history, "nothing to undo");
    const std::string expected = log_.back().pre_digest;
    log_.pop_back();
    current_ = replay(start_, log_, options_);
    detail::require(state_digest(current_) == expected, ErrorCode::digest_mismatch,
                    "undo replay does not reproduce the pre-move state");
    return current_;
  }

  ObstructionReport verdict() const { return make_report(current_); }

  static SessionState replay(const SessionState& start, const std::vector<LogEntry>& log,
                             const EngineOptions& options = {}) {
    SessionState s = start;
    for (const auto& e : log) s = apply_move(s, e.move, options);
    return s;
  }

 private:
  InitialPresentation init_;
  EngineOptions options_;
  SessionState start_;
  SessionState current_;
  std::vector<LogEntry> log_;
};

}  // namespace kslice
