#pragma once

#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "kslice/braid.hpp"
#include "kslice/error.hpp"
#include "kslice/framed_state.hpp"
#include "kslice/session.hpp"

namespace kslice::serialize {

using Json = nlohmann::json;

namespace detail {

[[noreturn]] inline void malformed(const std::string& what) {
  throw Error(ErrorCode::parse, "malformed document: " + what);
}

inline const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) malformed("expected an object around '" + std::string(key) + "'");
  auto it = j.find(key);
  if (it == j.end()) malformed("missing field '" + std::string(key) + "'");
  return *it;
}

inline std::int64_t integer(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number_integer()) malformed("field '" + std::string(key) + "' must be an integer");
  return v.get<std::int64_t>();
}

inline std::string text(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_string()) malformed("field '" + std::string(key) + "' must be a string");
  return v.get<std::string>();
}

inline bool boolean(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_boolean()) malformed("field '" + std::string(key) + "' must be a boolean");
  return v.get<bool>();
}

inline int sign(const Json& j, const char* key) {
  const auto s = integer(j, key);
  if (s != 1 && s != -1) malformed("field '" + std::string(key) + "' must be 1 or -1");
  return static_cast<int>(s);
}

template <class E, std::size_t N>
E enum_from(const std::string& s, const std::pair<E, std::string_view> (&table)[N], const char* what) {
  for (const auto& [e, name] : table)
    if (name == s) return e;
  malformed(std::string("unknown ") + what + " '" + s + "'");
}

inline constexpr std::pair<UnknotKnowledge, std::string_view> kUnknot[] = {
    {UnknotKnowledge::verified, "verified"}, {UnknotKnowledge::asserted, "asserted"},
    {UnknotKnowledge::unknown, "unknown"}};
inline constexpr std::pair<Origin, std::string_view> kOrigin[] = {{Origin::initial_knot, "initial_knot"},
                                                                  {Origin::blowup_circle, "blowup_circle"},
                                                                  {Origin::slide_result, "slide_result"},
                                                                  {Origin::replacement, "replacement"}};
inline constexpr std::pair<Mode, std::string_view> kMode[] = {{Mode::full, "full"}, {Mode::reduced, "reduced"}};
inline constexpr std::pair<Verdict, std::string_view> kVerdict[] = {
    {Verdict::not_smoothly_slice, "not_smoothly_slice"}, {Verdict::inconclusive, "inconclusive"}};
inline constexpr std::pair<ArfConsistency, std::string_view> kArf[] = {
    {ArfConsistency::consistent, "consistent"},
    {ArfConsistency::inconsistent, "inconsistent"},
    {ArfConsistency::unchecked, "unchecked"}};
inline constexpr std::pair<Assertion::Kind, std::string_view> kAssertion[] = {
    {Assertion::Kind::isotopy, "isotopy"},
    {Assertion::Kind::unknot, "unknot"},
    {Assertion::Kind::declared_blowup, "declared_blowup"},
    {Assertion::Kind::declared_presentation, "declared_presentation"}};

inline Json braid_json(const BraidWord& w) { return {{"strands", w.strand_count()}, {"word", to_string(w)}}; }

inline BraidWord braid_from(const Json& j) {
  const auto n = integer(j, "strands");
  if (n < 1 || n > 4096) malformed("strand count out of range");
  return parse_braid_word(text(j, "word"), static_cast<int>(n));
}

}  // namespace detail

// Reports -------------------------------------------------------------------------

inline Json to_json(const Assertion& a) {
  return {{"kind", to_string(a.kind)}, {"component", a.component}, {"detail", a.detail}};
}

inline Assertion assertion_from_json(const Json& j) {
  return {detail::enum_from(detail::text(j, "kind"), detail::kAssertion, "assertion kind"),
          detail::text(j, "component"), detail::text(j, "detail")};
}

inline Json to_json(const ObstructionReport& r) {
  Json tp = Json::array(), decl = Json::array();
  for (const auto& a : r.trust_points) tp.push_back(to_json(a));
  for (const auto& a : r.declarations) decl.push_back(to_json(a));
  return {{"b2", r.b2},
          {"sigma", r.sigma},
          {"margin", r.margin},
          {"verdict", to_string(r.verdict)},
          {"spin_structure", r.spin_structure},
          {"trust_points", tp},
          {"declarations", decl},
          {"arf_consistency", to_string(r.arf_consistency)},
          {"arf", r.arf ? Json(*r.arf) : Json(nullptr)},
          {"warnings", r.warnings}};
}

inline ObstructionReport report_from_json(const Json& j) {
  ObstructionReport r;
  r.b2 = detail::integer(j, "b2");
  r.sigma = detail::integer(j, "sigma");
  r.margin = detail::integer(j, "margin");
  if (r.margin != obstruction_margin(r.b2, r.sigma)) detail::malformed("margin disagrees with b2 and sigma");
  r.verdict = detail::enum_from(detail::text(j, "verdict"), detail::kVerdict, "verdict");
  r.spin_structure = detail::text(j, "spin_structure");
  for (const auto& a : detail::field(j, "trust_points")) r.trust_points.push_back(assertion_from_json(a));
  for (const auto& a : detail::field(j, "declarations")) r.declarations.push_back(assertion_from_json(a));
  r.arf_consistency = detail::enum_from(detail::text(j, "arf_consistency"), detail::kArf, "arf consistency");
  if (const auto& arf = detail::field(j, "arf"); !arf.is_null()) r.arf = static_cast<int>(detail::integer(j, "arf"));
  for (const auto& w : detail::field(j, "warnings")) r.warnings.push_back(w.get<std::string>());
  return r;
}

// Moves ---------------------------------------------------------------------------

inline Json to_json(const Move& move) {
  return std::visit(
      kslice::detail::overloaded{
          [](const BlowUpCoherent& m) {
            Json at;
            switch (m.locus.position.kind) {
              case InsertPosition::Kind::start: at = "start"; break;
              case InsertPosition::Kind::end: at = "end"; break;
              case InsertPosition::Kind::index: at = m.locus.position.index; break;
            }
            return Json{{"type", "blowup_coherent"},
                        {"sign", m.sign},
                        {"piece", m.piece},
                        {"strands", {m.locus.first, m.locus.last}},
                        {"at", at},
                        {"form", m.locus.form == TwistForm::reversed ? "reversed" : "forward"}};
          },
          [](const BlowUpDeclared& m) {
            Json lk = Json::array();
            for (const auto& [id, v] : m.linking) lk.push_back({id, v});
            return Json{{"type", "blowup_declared"}, {"sign", m.sign}, {"linking", lk}};
          },
          [](const BlowUpMeridian& m) {
            return Json{{"type", "meridian"}, {"sign", m.sign}, {"component", m.component}, {"times", m.times}};
          },
          [](const BlowDown& m) { return Json{{"type", "blowdown"}, {"component", m.component}}; },
          [](const SlideAbstract& m) {
            return Json{{"type", "slide"}, {"moving", m.moving}, {"over", m.over}, {"orientation", m.orientation}};
          },
          [](const ReplacePieceAsserted& m) {
            return Json{{"type", "replace"},
                        {"component", m.component},
                        {"braid", detail::braid_json(m.word)},
                        {"framing", m.framing},
                        {"label", m.label}};
          },
          [](const AssertUnknot& m) { return Json{{"type", "assert_unknot"}, {"component", m.component}}; },
          [](const Endgame&) { return Json{{"type", "endgame"}}; },
          [](const ConnectedSum& m) {
            return Json{{"type", "sum"}, {"source", m.source}, {"summand", to_json(m.summand)}};
          },
      },
      move);
}

/// Optional fields follow the script defaults: piece "K", at "end", form
/// "forward", times 1, orientation +1, empty label.
inline Move move_from_json(const Json& j) {
  const std::string type = detail::text(j, "type");
  if (type == "blowup_coherent") {
    BlowUpCoherent m;
    m.sign = detail::sign(j, "sign");
    m.piece = j.contains("piece") ? detail::text(j, "piece") : "K";
    const Json& s = detail::field(j, "strands");
    if (!s.is_array() || s.size() != 2 || !s[0].is_number_integer() || !s[1].is_number_integer())
      detail::malformed("'strands' must be [first, last]");
    m.locus.first = s[0].get<int>();
    m.locus.last = s[1].get<int>();
    m.locus.position = InsertPosition::at_end();
    if (j.contains("at")) {
      const Json& at = j["at"];
      if (at == "start") m.locus.position = InsertPosition::at_start();
      else if (at == "end") m.locus.position = InsertPosition::at_end();
      else if (at.is_number_unsigned()) m.locus.position = InsertPosition::at(at.get<std::size_t>());
      else detail::malformed("'at' must be \"start\", \"end\" or a nonnegative index");
    }
    if (j.contains("form")) {
      const auto f = detail::text(j, "form");
      if (f == "reversed") m.locus.form = TwistForm::reversed;
      else if (f != "forward") detail::malformed("'form' must be \"forward\" or \"reversed\"");
    }
    return m;
  }
  if (type == "blowup_declared") {
    BlowUpDeclared m;
    m.sign = detail::sign(j, "sign");
    const Json& lk = detail::field(j, "linking");
    if (lk.is_object()) {
      for (const auto& [id, v] : lk.items()) {
        if (!v.is_number_integer()) detail::malformed("linking values must be integers");
        m.linking.emplace_back(id, v.get<std::int64_t>());
      }
    } else if (lk.is_array()) {
      for (const auto& e : lk) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_number_integer())
          detail::malformed("linking entries must be [component, integer]");
        m.linking.emplace_back(e[0].get<std::string>(), e[1].get<std::int64_t>());
      }
    } else {
      detail::malformed("'linking' must be an object or an array");
    }
    return m;
  }
  if (type == "meridian") {
    const auto times = j.contains("times") ? detail::integer(j, "times") : 1;
    if (times < 1 || times > 100000) detail::malformed("'times' out of range");
    return BlowUpMeridian{detail::sign(j, "sign"), detail::text(j, "component"), static_cast<int>(times)};
  }
  if (type == "blowdown") return BlowDown{detail::text(j, "component")};
  if (type == "slide")
    return SlideAbstract{detail::text(j, "moving"), detail::text(j, "over"),
                         j.contains("orientation") ? detail::sign(j, "orientation") : 1};
  if (type == "replace")
    return ReplacePieceAsserted{detail::text(j, "component"), detail::braid_from(detail::field(j, "braid")),
                                detail::integer(j, "framing"), j.contains("label") ? detail::text(j, "label") : ""};
  if (type == "assert_unknot") return AssertUnknot{detail::text(j, "component")};
  if (type == "endgame") return Endgame{};
  if (type == "sum")
    return ConnectedSum{detail::text(j, "source"), report_from_json(detail::field(j, "summand"))};
  detail::malformed("unknown move type '" + type + "'");
}

// States --------------------------------------------------------------------------

inline Json to_json(const SessionState& s) {
  const auto& f = s.framed;
  Json comps = Json::array();
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto& c = f.components[i];
    comps.push_back({{"id", c.id},
                     {"framing", f.framing(i)},
                     {"characteristic", c.characteristic},
                     {"unknot", to_string(c.unknot)},
                     {"origin", to_string(c.origin)},
                     {"meridian_of", c.meridian_of},
                     {"touches", c.touches}});
  }
  Json pieces = Json::array();
  for (const auto& p : s.pieces) {
    Json pj{{"id", p.id}, {"component", p.component}, {"stale", p.stale}};
    pj["braid"] = detail::braid_json(p.word);
    pieces.push_back(std::move(pj));
  }
  Json assertions = Json::array();
  for (const auto& a : s.assertions) assertions.push_back(to_json(a));
  std::vector<std::string> mask;
  for (const auto& c : f.components)
    if (c.characteristic) mask.push_back(c.id);
  return {{"components", comps},
          {"dimension", f.size()},
          {"linking", f.linking.row_major()},
          {"b2", f.b2},
          {"sigma", f.sigma},
          {"margin", obstruction_margin(f.b2, f.sigma)},
          {"mode", to_string(f.mode)},
          {"characteristic", mask},
          {"pieces", pieces},
          {"assertions", assertions},
          {"warnings", s.warnings},
          {"next_circle", s.next_circle},
          {"knot_arf", s.knot_arf ? Json(*s.knot_arf) : Json(nullptr)},
          {"report", s.report ? to_json(*s.report) : Json(nullptr)},
          {"digest", state_digest(s)}};
}

/// Inverse of to_json(SessionState); rejects documents whose derived fields
/// (margin, mask list, digest) disagree with their sources.
inline SessionState state_from_json(const Json& j) {
  SessionState s;
  auto& f = s.framed;
  const auto n = detail::integer(j, "dimension");
  const Json& comps = detail::field(j, "components");
  if (n < 0 || !comps.is_array() || comps.size() != static_cast<std::size_t>(n))
    detail::malformed("component list does not match dimension");
  const Json& lk = detail::field(j, "linking");
  if (!lk.is_array() || lk.size() != static_cast<std::size_t>(n * n)) detail::malformed("linking has wrong size");
  std::vector<std::int64_t> entries;
  for (const auto& v : lk) {
    if (!v.is_number_integer()) detail::malformed("linking entries must be integers");
    entries.push_back(v.get<std::int64_t>());
  }
  f.linking = IntMatrix::from_row_major(static_cast<std::size_t>(n), std::move(entries));
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const Json& c = comps[i];
    Component comp;
    comp.id = detail::text(c, "id");
    comp.characteristic = detail::boolean(c, "characteristic");
    comp.unknot = detail::enum_from(detail::text(c, "unknot"), detail::kUnknot, "unknot status");
    comp.origin = detail::enum_from(detail::text(c, "origin"), detail::kOrigin, "origin");
    comp.meridian_of = detail::text(c, "meridian_of");
    for (const auto& t : detail::field(c, "touches")) comp.touches.push_back(t.get<std::string>());
    if (detail::integer(c, "framing") != f.linking(i, i)) detail::malformed("framing disagrees with linking");
    f.components.push_back(std::move(comp));
  }
  f.b2 = detail::integer(j, "b2");
  f.sigma = detail::integer(j, "sigma");
  if (detail::integer(j, "margin") != obstruction_margin(f.b2, f.sigma))
    detail::malformed("margin disagrees with b2 and sigma");
  f.mode = detail::enum_from(detail::text(j, "mode"), detail::kMode, "mode");
  for (const auto& p : detail::field(j, "pieces"))
    s.pieces.push_back({detail::text(p, "id"), detail::braid_from(detail::field(p, "braid")),
                        detail::boolean(p, "stale"), detail::text(p, "component")});
  for (const auto& a : detail::field(j, "assertions")) s.assertions.push_back(assertion_from_json(a));
  for (const auto& w : detail::field(j, "warnings")) s.warnings.push_back(w.get<std::string>());
  s.next_circle = static_cast<int>(detail::integer(j, "next_circle"));
  if (const auto& a = detail::field(j, "knot_arf"); !a.is_null()) s.knot_arf = static_cast<int>(a.get<std::int64_t>());
  if (const auto& r = detail::field(j, "report"); !r.is_null()) s.report = report_from_json(r);
  check_invariants(f, false);
  if (detail::text(j, "digest") != state_digest(s)) detail::malformed("digest does not match the state");
  return s;
}

// Sessions ------------------------------------------------------------------------

inline Json to_json(const InitialPresentation& init) {
  return std::visit(kslice::detail::overloaded{
                        [](const InitialKnot& k) {
                          Json j{{"kind", "knot"}, {"braid", detail::braid_json(k.word)}};
                          if (k.torus) j["torus"] = {k.torus->first, k.torus->second};
                          return j;
                        },
                        [](const InitialPieces& p) {
                          Json pieces = Json::array();
                          for (const auto& d : p.pieces) {
                            Json pj{{"id", d.id}, {"framing", d.framing}, {"characteristic", d.characteristic}};
                            pj["braid"] = d.word ? detail::braid_json(*d.word) : Json(nullptr);
                            pieces.push_back(std::move(pj));
                          }
                          Json j{{"kind", "pieces"}, {"pieces", pieces}};
                          j["counters"] = p.counters ? Json{{"b2", p.counters->b2}, {"sigma", p.counters->sigma}}
                                                     : Json(nullptr);
                          return j;
                        },
                    },
                    init);
}

inline std::vector<PieceDeclaration> pieces_from_json(const Json& arr) {
  if (!arr.is_array()) detail::malformed("'pieces' must be an array");
  std::vector<PieceDeclaration> out;
  for (const auto& p : arr) {
    PieceDeclaration d;
    d.id = detail::text(p, "id");
    d.framing = detail::integer(p, "framing");
    d.characteristic = p.contains("characteristic") && detail::boolean(p, "characteristic");
    if (p.contains("braid") && !p["braid"].is_null()) d.word = detail::braid_from(p["braid"]);
    out.push_back(std::move(d));
  }
  return out;
}

inline std::optional<Counters> counters_from_json(const Json& c) {
  if (c.is_null()) return std::nullopt;
  return Counters{detail::integer(c, "b2"), detail::integer(c, "sigma")};
}

inline InitialPresentation initial_from_json(const Json& j) {
  const auto kind = detail::text(j, "kind");
  if (kind == "knot") {
    InitialKnot k{detail::braid_from(detail::field(j, "braid")), std::nullopt};
    if (j.contains("torus")) k.torus = std::make_pair(j["torus"][0].get<int>(), j["torus"][1].get<int>());
    return k;
  }
  if (kind == "pieces")
    return InitialPieces{pieces_from_json(detail::field(j, "pieces")),
                         j.contains("counters") ? counters_from_json(j["counters"]) : std::nullopt};
  detail::malformed("unknown initial presentation '" + kind + "'");
}

inline Json to_json(const LogEntry& e) {
  return {{"move", to_json(e.move)},
          {"pre_digest", e.pre_digest},
          {"delta_b2", e.delta_b2},
          {"delta_sigma", e.delta_sigma}};
}

inline Json links_for(const std::string& id, const Session& session) {
  const std::string base = "/sessions/" + id;
  Json links = Json::array();
  links.push_back({{"rel", "self"}, {"method", "GET"}, {"href", base}});
  links.push_back({{"rel", "move"}, {"method", "POST"}, {"href", base + "/moves"}});
  if (!session.log().empty()) links.push_back({{"rel", "undo"}, {"method", "POST"}, {"href", base + "/undo"}});
  links.push_back({{"rel", "export"}, {"method", "GET"}, {"href", base + "/export"}});
  if (session.state().framed.characteristic_indices().empty())
    links.push_back({{"rel", "report"}, {"method", "GET"}, {"href", base + "/report"}});
  return links;
}

/// The wire document for one session.
inline Json session_document(const std::string& id, const Session& session) {
  Json history = Json::array();
  for (const auto& e : session.log()) history.push_back(to_json(e));
  return {{"id", id},
          {"initial", to_json(session.initial())},
          {"state", to_json(session.state())},
          {"history", history},
          {"links", links_for(id, session)}};
}

/// Rebuilds a session by replaying the document's history; every recorded
/// pre-move digest and the final digest must match.
inline Session session_from_document(const Json& doc, EngineOptions options = {}) {
  Session session(initial_from_json(detail::field(doc, "initial")), options);
  for (const auto& e : detail::field(doc, "history")) {
    if (session.digest() != detail::text(e, "pre_digest")) detail::malformed("history digest mismatch");
    session.apply(move_from_json(detail::field(e, "move")));
  }
  if (session.digest() != detail::text(detail::field(doc, "state"), "digest"))
    detail::malformed("final digest mismatch");
  return session;
}

}  // namespace kslice::serialize
