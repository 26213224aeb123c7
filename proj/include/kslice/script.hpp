#pragma once

#include <cctype>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "kslice/braid.hpp"
#include "kslice/error.hpp"
#include "kslice/framed_state.hpp"
#include "kslice/session.hpp"

namespace kslice::script {

struct SourcePos {
  std::size_t line = 0;
  std::size_t column = 0;
  std::size_t offset = 0;
};

/// A braid literal as written plus its expansion.
struct BraidLiteral {
  int strands = 1;
  std::string text;
  BraidWord word;
  friend bool operator==(const BraidLiteral&, const BraidLiteral&) = default;
};

struct KnotBraid { BraidLiteral braid; friend bool operator==(const KnotBraid&, const KnotBraid&) = default; };
struct KnotTorus { int p = 0; int q = 0; friend bool operator==(const KnotTorus&, const KnotTorus&) = default; };
struct PieceStmt {
  std::string id;
  std::optional<BraidLiteral> braid;  // nullopt = unknot
  std::int64_t framing = 0;
  bool characteristic = false;
  friend bool operator==(const PieceStmt&, const PieceStmt&) = default;
};
struct CountersStmt { Counters counters; friend bool operator==(const CountersStmt&, const CountersStmt&) = default; };
struct BlowupStrands {
  int sign = -1;
  int first = 1;
  int last = 1;
  std::optional<std::string> piece;
  std::optional<InsertPosition> at;
  std::optional<int> times;
  bool reversed = false;
  friend bool operator==(const BlowupStrands&, const BlowupStrands&) = default;
};
struct BlowupDeclaredStmt {
  int sign = -1;
  std::vector<std::pair<std::string, std::int64_t>> linking;
  friend bool operator==(const BlowupDeclaredStmt&, const BlowupDeclaredStmt&) = default;
};
struct MeridianStmt {
  int sign = 1;
  std::string component;
  std::optional<int> times;
  friend bool operator==(const MeridianStmt&, const MeridianStmt&) = default;
};
struct BlowdownStmt { std::string component; friend bool operator==(const BlowdownStmt&, const BlowdownStmt&) = default; };
struct SlideStmt {
  std::string moving;
  std::string over;
  std::optional<int> sign;
  friend bool operator==(const SlideStmt&, const SlideStmt&) = default;
};
struct ReplaceStmt {
  std::string component;
  BraidLiteral braid;
  std::int64_t framing = 0;
  std::optional<std::string> label;
  friend bool operator==(const ReplaceStmt&, const ReplaceStmt&) = default;
};
struct AssertUnknotStmt { std::string component; friend bool operator==(const AssertUnknotStmt&, const AssertUnknotStmt&) = default; };
struct EndgameStmt { friend bool operator==(const EndgameStmt&, const EndgameStmt&) = default; };
struct SumStmt { std::string path; friend bool operator==(const SumStmt&, const SumStmt&) = default; };

struct ExpectCheck {
  enum class Kind { b2, sigma, framing, margin, characteristic };
  Kind kind = Kind::b2;
  std::string component;                // framing
  std::int64_t value = 0;               // b2, sigma, framing, margin
  std::vector<std::string> components;  // characteristic set
  friend bool operator==(const ExpectCheck&, const ExpectCheck&) = default;
};
struct ExpectStmt { std::vector<ExpectCheck> checks; friend bool operator==(const ExpectStmt&, const ExpectStmt&) = default; };
struct VerdictStmt { friend bool operator==(const VerdictStmt&, const VerdictStmt&) = default; };

using StatementBody =
    std::variant<KnotBraid, KnotTorus, PieceStmt, CountersStmt, BlowupStrands, BlowupDeclaredStmt, MeridianStmt,
                 BlowdownStmt, SlideStmt, ReplaceStmt, AssertUnknotStmt, EndgameStmt, SumStmt, ExpectStmt,
                 VerdictStmt>;

struct Statement {
  StatementBody body;
  SourcePos pos;
  /// Source positions are diagnostics only.
  friend bool operator==(const Statement& a, const Statement& b) { return a.body == b.body; }
};

struct Script {
  std::vector<Statement> statements;
  friend bool operator==(const Script&, const Script&) = default;
};

/// Error raised while running a statement; carries its source position.
class ScriptError : public Error {
 public:
  ScriptError(ErrorCode code, const std::string& message, SourcePos pos)
      : Error(code, std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " + message), pos_(pos) {}
  SourcePos pos() const noexcept { return pos_; }

 private:
  SourcePos pos_;
};

// Lexing -------------------------------------------------------------------------

namespace detail {

struct Token {
  enum class Kind { word, integer, string, sign, punct, end };
  Kind kind = Kind::end;
  std::string text;
  std::int64_t value = 0;
  SourcePos pos;
};

inline std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0, line = 1, col = 1;
  const auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  const auto is_word_start = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; };
  const auto is_word_char = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
  };
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.pos = {line, col, i};
    if (is_word_start(c)) {
      std::size_t j = i;
      while (j < src.size() &&
             (is_word_char(src[j]) ||
              (src[j] == '-' && j + 1 < src.size() && std::isalpha(static_cast<unsigned char>(src[j + 1])))))
        ++j;
      // ".." never belongs to a word
      std::string_view w = src.substr(i, j - i);
      if (auto dots = w.find(".."); dots != std::string_view::npos) {
        j = i + dots;
        w = src.substr(i, dots);
      }
      t.kind = Token::Kind::word;
      t.text = std::string(w);
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               (c == '-' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      std::size_t j = i + (c == '-' ? 1 : 0);
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.kind = Token::Kind::integer;
      t.text = std::string(src.substr(i, j - i));
      if (t.text.size() > 18) throw ParseError("integer literal too long", i, line, col);
      t.value = std::stoll(t.text);
      advance(j - i);
    } else if (c == '"') {
      std::size_t j = i + 1;
      std::string value;
      while (j < src.size() && src[j] != '"' && src[j] != '\n') {
        if (src[j] == '\\' && j + 1 < src.size()) ++j;
        value += src[j++];
      }
      if (j >= src.size() || src[j] != '"') throw ParseError("unterminated string", i, line, col);
      t.kind = Token::Kind::string;
      t.text = std::move(value);
      advance(j + 1 - i);
    } else if (c == '+' || c == '-') {
      t.kind = Token::Kind::sign;
      t.text = std::string(1, c);
      advance(1);
    } else if (c == '.' && i + 1 < src.size() && src[i + 1] == '.') {
      t.kind = Token::Kind::punct;
      t.text = "..";
      advance(2);
    } else if (std::string_view("(){},:").find(c) != std::string_view::npos) {
      t.kind = Token::Kind::punct;
      t.text = std::string(1, c);
      advance(1);
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'", i, line, col);
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.kind = Token::Kind::end;
  end.pos = {line, col, src.size()};
  out.push_back(end);
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : tokens_(tokenize(src)) {}

  Script parse() {
    Script s;
    while (peek().kind != Token::Kind::end) s.statements.push_back(statement());
    return s;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  const Token& next() { return tokens_[std::min(pos_++, tokens_.size() - 1)]; }

  [[noreturn]] void error(const Token& t, const std::string& what) const {
    const std::string found = t.kind == Token::Kind::end ? "end of input" : "'" + t.text + "'";
    throw ParseError(what + ", found " + found, t.pos.offset, t.pos.line, t.pos.column);
  }

  bool at_word(std::string_view w) const { return peek().kind == Token::Kind::word && peek().text == w; }
  bool at_punct(std::string_view p) const { return peek().kind == Token::Kind::punct && peek().text == p; }

  void keyword(std::string_view w) {
    if (!at_word(w)) error(peek(), "expected '" + std::string(w) + "'");
    next();
  }
  void punct(std::string_view p) {
    if (!at_punct(p)) error(peek(), "expected '" + std::string(p) + "'");
    next();
  }
  std::int64_t integer() {
    if (peek().kind != Token::Kind::integer) error(peek(), "expected integer");
    return next().value;
  }
  int small_int() {
    const Token& t = peek();
    const auto v = integer();
    if (v < -1'000'000'000 || v > 1'000'000'000) error(t, "integer out of range");
    return static_cast<int>(v);
  }
  std::string identifier() {
    if (peek().kind != Token::Kind::word) error(peek(), "expected identifier");
    return next().text;
  }
  std::string string_literal() {
    if (peek().kind != Token::Kind::string) error(peek(), "expected string");
    return next().text;
  }
  int sign() {
    if (peek().kind != Token::Kind::sign) error(peek(), "expected sign '+' or '-'");
    return next().text == "+" ? 1 : -1;
  }

  BraidLiteral braid_literal() {
    const Token& strands_tok = peek();
    const int strands = small_int();
    if (strands < 1) error(strands_tok, "strand count must be at least 1");
    const Token& str = peek();
    const std::string text = string_literal();
    try {
      return {strands, text, parse_braid_word(text, strands)};
    } catch (const ParseError& e) {
      // point into the string literal (one past the opening quote)
      throw ParseError("in braid word: " + e.message(), str.pos.offset + 1 + e.offset(), str.pos.line,
                       str.pos.column + 1 + e.offset());
    }
  }

  Statement statement() {
    const Token& head = peek();
    if (head.kind != Token::Kind::word) error(head, "expected a statement keyword");
    Statement st;
    st.pos = head.pos;
    const std::string kw = next().text;
    if (kw == "knot") {
      if (at_word("braid")) {
        next();
        st.body = KnotBraid{braid_literal()};
      } else if (at_word("torus")) {
        next();
        punct("(");
        KnotTorus k;
        k.p = small_int();
        punct(",");
        k.q = small_int();
        punct(")");
        st.body = k;
      } else {
        error(peek(), "expected 'braid' or 'torus'");
      }
    } else if (kw == "piece") {
      PieceStmt p;
      p.id = identifier();
      if (at_word("braid")) {
        next();
        p.braid = braid_literal();
      } else if (at_word("unknot")) {
        next();
      } else {
        error(peek(), "expected 'braid' or 'unknot'");
      }
      keyword("framing");
      p.framing = integer();
      if (at_word("char")) {
        next();
        p.characteristic = true;
      }
      st.body = p;
    } else if (kw == "counters") {
      CountersStmt c;
      keyword("b2");
      c.counters.b2 = integer();
      keyword("sigma");
      c.counters.sigma = integer();
      st.body = c;
    } else if (kw == "blowup") {
      const int s = sign();
      if (at_word("strands")) {
        next();
        BlowupStrands b;
        b.sign = s;
        b.first = small_int();
        punct("..");
        b.last = small_int();
        if (at_word("of")) {
          next();
          b.piece = identifier();
        }
        if (at_word("at")) {
          next();
          if (at_word("start")) {
            next();
            b.at = InsertPosition::at_start();
          } else if (at_word("end")) {
            next();
            b.at = InsertPosition::at_end();
          } else {
            const Token& t = peek();
            const auto v = integer();
            if (v < 0) error(t, "insertion index must be nonnegative");
            b.at = InsertPosition::at(static_cast<std::size_t>(v));
          }
        }
        if (at_word("times")) {
          next();
          b.times = small_int();
        }
        if (at_word("reversed")) {
          next();
          b.reversed = true;
        }
        st.body = b;
      } else if (at_word("declared")) {
        next();
        BlowupDeclaredStmt d;
        d.sign = s;
        punct("{");
        while (!at_punct("}")) {
          std::string id = identifier();
          punct(":");
          d.linking.emplace_back(std::move(id), integer());
          if (at_punct(",")) next();
        }
        punct("}");
        st.body = d;
      } else {
        error(peek(), "expected 'strands' or 'declared'");
      }
    } else if (kw == "meridian") {
      MeridianStmt m;
      m.sign = sign();
      keyword("of");
      m.component = identifier();
      if (at_word("times")) {
        next();
        m.times = small_int();
      }
      st.body = m;
    } else if (kw == "blowdown") {
      st.body = BlowdownStmt{identifier()};
    } else if (kw == "slide") {
      SlideStmt s;
      s.moving = identifier();
      keyword("over");
      s.over = identifier();
      if (peek().kind == Token::Kind::sign) s.sign = sign();
      st.body = s;
    } else if (kw == "replace") {
      ReplaceStmt r;
      r.component = identifier();
      keyword("braid");
      r.braid = braid_literal();
      keyword("framing");
      r.framing = integer();
      keyword("assert-isotopy");
      if (at_word("as")) {
        next();
        r.label = string_literal();
      }
      st.body = r;
    } else if (kw == "assert-unknot") {
      st.body = AssertUnknotStmt{identifier()};
    } else if (kw == "endgame") {
      st.body = EndgameStmt{};
    } else if (kw == "sum") {
      st.body = SumStmt{string_literal()};
    } else if (kw == "expect") {
      ExpectStmt e;
      for (;;) {
        ExpectCheck c;
        if (at_word("b2")) {
          next();
          c.kind = ExpectCheck::Kind::b2;
          c.value = integer();
        } else if (at_word("sigma")) {
          next();
          c.kind = ExpectCheck::Kind::sigma;
          c.value = integer();
        } else if (at_word("margin")) {
          next();
          c.kind = ExpectCheck::Kind::margin;
          c.value = integer();
        } else if (at_word("framing")) {
          next();
          c.kind = ExpectCheck::Kind::framing;
          c.component = identifier();
          c.value = integer();
        } else if (at_word("char")) {
          next();
          c.kind = ExpectCheck::Kind::characteristic;
          punct("{");
          while (!at_punct("}")) {
            c.components.push_back(identifier());
            if (at_punct(",")) next();
          }
          punct("}");
        } else {
          break;
        }
        e.checks.push_back(std::move(c));
      }
      if (e.checks.empty()) error(peek(), "expected 'b2', 'sigma', 'framing', 'margin' or 'char'");
      st.body = std::move(e);
    } else if (kw == "verdict") {
      st.body = VerdictStmt{};
    } else {
      error(head, "unknown statement");
    }
    return st;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

inline std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

inline std::string sign_text(int s) { return s > 0 ? "+" : "-"; }

}  // namespace detail

inline Script parse_script(std::string_view text) { return detail::Parser(text).parse(); }

inline std::string to_string(const BraidLiteral& b) {
  return std::to_string(b.strands) + " " + detail::quote(b.text);
}

/// Canonical one-line rendering; parse_script(to_string(s)) == s.
inline std::string to_string(const Statement& st) {
  using detail::sign_text;
  return std::visit(
      kslice::detail::overloaded{
          [](const KnotBraid& k) { return "knot braid " + to_string(k.braid); },
          [](const KnotTorus& k) { return "knot torus(" + std::to_string(k.p) + "," + std::to_string(k.q) + ")"; },
          [](const PieceStmt& p) {
            std::string s = "piece " + p.id + (p.braid ? " braid " + to_string(*p.braid) : std::string(" unknot"));
            s += " framing " + std::to_string(p.framing);
            if (p.characteristic) s += " char";
            return s;
          },
          [](const CountersStmt& c) {
            return "counters b2 " + std::to_string(c.counters.b2) + " sigma " + std::to_string(c.counters.sigma);
          },
          [](const BlowupStrands& b) {
            std::string s = "blowup " + sign_text(b.sign) + " strands " + std::to_string(b.first) + ".." +
                            std::to_string(b.last);
            if (b.piece) s += " of " + *b.piece;
            if (b.at) {
              switch (b.at->kind) {
                case InsertPosition::Kind::start: s += " at start"; break;
                case InsertPosition::Kind::end: s += " at end"; break;
                case InsertPosition::Kind::index: s += " at " + std::to_string(b.at->index); break;
              }
            }
            if (b.times) s += " times " + std::to_string(*b.times);
            if (b.reversed) s += " reversed";
            return s;
          },
          [](const BlowupDeclaredStmt& d) {
            std::string s = "blowup " + sign_text(d.sign) + " declared {";
            for (std::size_t k = 0; k < d.linking.size(); ++k)
              s += (k ? ", " : "") + d.linking[k].first + ": " + std::to_string(d.linking[k].second);
            return s + "}";
          },
          [](const MeridianStmt& m) {
            std::string s = "meridian " + sign_text(m.sign) + " of " + m.component;
            if (m.times) s += " times " + std::to_string(*m.times);
            return s;
          },
          [](const BlowdownStmt& b) { return "blowdown " + b.component; },
          [](const SlideStmt& s) {
            std::string out = "slide " + s.moving + " over " + s.over;
            if (s.sign) out += " " + sign_text(*s.sign);
            return out;
          },
          [](const ReplaceStmt& r) {
            std::string s = "replace " + r.component + " braid " + to_string(r.braid) + " framing " +
                            std::to_string(r.framing) + " assert-isotopy";
            if (r.label) s += " as " + detail::quote(*r.label);
            return s;
          },
          [](const AssertUnknotStmt& a) { return "assert-unknot " + a.component; },
          [](const EndgameStmt&) { return std::string("endgame"); },
          [](const SumStmt& s) { return "sum " + detail::quote(s.path); },
          [](const ExpectStmt& e) {
            std::string s = "expect";
            for (const auto& c : e.checks) {
              switch (c.kind) {
                case ExpectCheck::Kind::b2: s += " b2 " + std::to_string(c.value); break;
                case ExpectCheck::Kind::sigma: s += " sigma " + std::to_string(c.value); break;
                case ExpectCheck::Kind::margin: s += " margin " + std::to_string(c.value); break;
                case ExpectCheck::Kind::framing: s += " framing " + c.component + " " + std::to_string(c.value); break;
                case ExpectCheck::Kind::characteristic: {
                  s += " char {";
                  for (std::size_t k = 0; k < c.components.size(); ++k) s += (k ? " " : "") + c.components[k];
                  s += "}";
                  break;
                }
              }
            }
            return s;
          },
          [](const VerdictStmt&) { return std::string("verdict"); },
      },
      st.body);
}

inline std::string to_string(const Script& s) {
  std::string out;
  for (const auto& st : s.statements) out += to_string(st) + "\n";
  return out;
}

// Export -------------------------------------------------------------------------

inline Statement statement_for(const Move& move) {
  Statement st;
  st.body = std::visit(
      kslice::detail::overloaded{
          [](const BlowUpCoherent& m) -> StatementBody {
            BlowupStrands b;
            b.sign = m.sign;
            b.first = m.locus.first;
            b.last = m.locus.last;
            b.piece = m.piece;
            b.at = m.locus.position;
            b.reversed = m.locus.form == TwistForm::reversed;
            return b;
          },
          [](const BlowUpDeclared& m) -> StatementBody { return BlowupDeclaredStmt{m.sign, m.linking}; },
          [](const BlowUpMeridian& m) -> StatementBody { return MeridianStmt{m.sign, m.component, m.times}; },
          [](const BlowDown& m) -> StatementBody { return BlowdownStmt{m.component}; },
          [](const SlideAbstract& m) -> StatementBody { return SlideStmt{m.moving, m.over, m.orientation}; },
          [](const ReplacePieceAsserted& m) -> StatementBody {
            ReplaceStmt r;
            r.component = m.component;
            r.braid = {m.word.strand_count(), to_string(m.word), m.word};
            r.framing = m.framing;
            if (!m.label.empty()) r.label = m.label;
            return r;
          },
          [](const AssertUnknot& m) -> StatementBody { return AssertUnknotStmt{m.component}; },
          [](const Endgame&) -> StatementBody { return EndgameStmt{}; },
          [](const ConnectedSum& m) -> StatementBody { return SumStmt{m.source}; },
      },
      move);
  return st;
}

inline std::vector<Statement> initial_statements(const InitialPresentation& init) {
  std::vector<Statement> out;
  std::visit(kslice::detail::overloaded{
                 [&](const InitialKnot& k) {
                   if (k.torus) out.push_back({KnotTorus{k.torus->first, k.torus->second}, {}});
                   else out.push_back({KnotBraid{{k.word.strand_count(), to_string(k.word), k.word}}, {}});
                 },
                 [&](const InitialPieces& p) {
                   for (const auto& d : p.pieces) {
                     PieceStmt ps;
                     ps.id = d.id;
                     if (d.word) ps.braid = BraidLiteral{d.word->strand_count(), to_string(*d.word), *d.word};
                     ps.framing = d.framing;
                     ps.characteristic = d.characteristic;
                     out.push_back({ps, {}});
                   }
                   if (p.counters) out.push_back({CountersStmt{*p.counters}, {}});
                 },
             },
             init);
  return out;
}

/// `.kmove` transcription of a session's history.
inline std::string export_script(const Session& session) {
  Script s;
  s.statements = initial_statements(session.initial());
  for (const auto& e : session.log()) s.statements.push_back(statement_for(e.move));
  return to_string(s);
}

// Interpretation -------------------------------------------------------------------

struct Checkpoint {
  std::size_t line = 0;
  std::string text;
};

struct RunResult {
  std::optional<Session> session;
  std::optional<ObstructionReport> report;
  std::vector<Checkpoint> checkpoints;
};

struct RunOptions {
  EngineOptions engine;
  /// Directory that `sum` paths are resolved against.
  std::filesystem::path base_dir = ".";
  int max_sum_depth = 8;
};

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) kslice::detail::fail(ErrorCode::io, "cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run_script(const Script& script, const RunOptions& options = {});

namespace detail {

inline std::vector<Move> moves_for(const StatementBody& body, const Session& session) {
  std::vector<Move> out;
  if (const auto* b = std::get_if<BlowupStrands>(&body)) {
    const std::string piece = b->piece.value_or(session.state().pieces.empty() ? std::string("K")
                                                                              : session.state().pieces.front().id);
    TwistLocus locus{b->first, b->last, b->at.value_or(InsertPosition::at_end()),
                     b->reversed ? TwistForm::reversed : TwistForm::forward};
    const int times = b->times.value_or(1);
    kslice::detail::require(times >= 1, ErrorCode::invalid_argument, "blow-up repeat count must be positive");
    for (int t = 0; t < times; ++t) out.push_back(BlowUpCoherent{b->sign, piece, locus});
  } else if (const auto* d = std::get_if<BlowupDeclaredStmt>(&body)) {
    out.push_back(BlowUpDeclared{d->sign, d->linking});
  } else if (const auto* m = std::get_if<MeridianStmt>(&body)) {
    out.push_back(BlowUpMeridian{m->sign, m->component, m->times.value_or(1)});
  } else if (const auto* bd = std::get_if<BlowdownStmt>(&body)) {
    out.push_back(BlowDown{bd->component});
  } else if (const auto* s = std::get_if<SlideStmt>(&body)) {
    out.push_back(SlideAbstract{s->moving, s->over, s->sign.value_or(1)});
  } else if (const auto* r = std::get_if<ReplaceStmt>(&body)) {
    out.push_back(ReplacePieceAsserted{r->component, r->braid.word, r->framing, r->label.value_or("")});
  } else if (const auto* a = std::get_if<AssertUnknotStmt>(&body)) {
    out.push_back(AssertUnknot{a->component});
  } else if (std::holds_alternative<EndgameStmt>(body)) {
    out.push_back(Endgame{});
  }
  return out;
}

inline std::string describe_mask(const FramedLinkState& f) {
  std::string s = "{";
  bool first = true;
  for (const auto& c : f.components)
    if (c.characteristic) {
      s += (first ? "" : " ") + c.id;
      first = false;
    }
  return s + "}";
}

inline void check_expect(const ExpectStmt& e, const Session& session, const Statement& st) {
  const auto& f = session.state().framed;
  std::string diff;
  for (const auto& c : e.checks) {
    std::int64_t actual = 0;
    std::string name;
    switch (c.kind) {
      case ExpectCheck::Kind::b2: actual = f.b2; name = "b2"; break;
      case ExpectCheck::Kind::sigma: actual = f.sigma; name = "sigma"; break;
      case ExpectCheck::Kind::margin: actual = obstruction_margin(f.b2, f.sigma); name = "margin"; break;
      case ExpectCheck::Kind::framing: {
        const auto i = f.find(c.component);
        if (!i) {
          diff += "\n  framing " + c.component + ": expected " + std::to_string(c.value) + ", component not live";
          continue;
        }
        actual = f.framing(*i);
        name = "framing " + c.component;
        break;
      }
      case ExpectCheck::Kind::characteristic: {
        std::vector<std::string> want = c.components, have;
        for (const auto& comp : f.components)
          if (comp.characteristic) have.push_back(comp.id);
        std::sort(want.begin(), want.end());
        std::sort(have.begin(), have.end());
        if (want != have) {
          std::string w = "{";
          for (std::size_t k = 0; k < c.components.size(); ++k) w += (k ? " " : "") + c.components[k];
          diff += "\n  char: expected " + w + "}, actual " + describe_mask(f);
        }
        continue;
      }
    }
    if (actual != c.value)
      diff += "\n  " + name + ": expected " + std::to_string(c.value) + ", actual " + std::to_string(actual);
  }
  if (!diff.empty()) throw ScriptError(ErrorCode::expect_failed, "expectation failed:" + diff, st.pos);
}

}  // namespace detail

inline RunResult run_script(const Script& script, const RunOptions& options) {
  RunResult result;
  std::optional<InitialKnot> knot;
  InitialPieces pieces;
  bool declared_pieces = false;

  const auto ensure_session = [&](const Statement& st) {
    if (result.session) return;
    if (knot) {
      result.session.emplace(*knot, options.engine);
    } else if (declared_pieces) {
      result.session.emplace(pieces, options.engine);
    } else {
      throw ScriptError(ErrorCode::invalid_argument, "no knot or piece declared before the first move", st.pos);
    }
  };
  const auto rethrow = [](const Error& e, const Statement& st) -> ScriptError {
    return ScriptError(e.code(), e.what(), st.pos);
  };

  for (const auto& st : script.statements) {
    try {
      const auto& body = st.body;
      const bool is_declaration = std::holds_alternative<KnotBraid>(body) || std::holds_alternative<KnotTorus>(body) ||
                                  std::holds_alternative<PieceStmt>(body) || std::holds_alternative<CountersStmt>(body);
      if (is_declaration) {
        if (result.session || knot)
          throw ScriptError(ErrorCode::invalid_argument, "declarations must precede all moves and appear once",
                            st.pos);
        if (const auto* k = std::get_if<KnotBraid>(&body)) {
          if (declared_pieces)
            throw ScriptError(ErrorCode::invalid_argument, "cannot mix 'knot' with 'piece' declarations", st.pos);
          knot = InitialKnot{k->braid.word, std::nullopt};
        } else if (const auto* t = std::get_if<KnotTorus>(&body)) {
          if (declared_pieces)
            throw ScriptError(ErrorCode::invalid_argument, "cannot mix 'knot' with 'piece' declarations", st.pos);
          kslice::detail::require(t->p >= 1, ErrorCode::invalid_argument, "torus knot needs p >= 1");
          knot = InitialKnot{torus_braid(t->p, t->q), std::make_pair(t->p, t->q)};
        } else if (const auto* p = std::get_if<PieceStmt>(&body)) {
          if (pieces.counters)
            throw ScriptError(ErrorCode::invalid_argument, "'piece' after 'counters'", st.pos);
          declared_pieces = true;
          pieces.pieces.push_back(
              {p->id, p->braid ? std::optional<BraidWord>(p->braid->word) : std::nullopt, p->framing,
               p->characteristic});
        } else if (const auto* c = std::get_if<CountersStmt>(&body)) {
          if (!declared_pieces || pieces.counters)
            throw ScriptError(ErrorCode::invalid_argument, "'counters' must follow the piece declarations once",
                              st.pos);
          pieces.counters = c->counters;
        }
        continue;
      }
      ensure_session(st);
      Session& session = *result.session;
      if (const auto* e = std::get_if<ExpectStmt>(&body)) {
        detail::check_expect(*e, session, st);
        result.checkpoints.push_back({st.pos.line, to_string(st)});
      } else if (std::holds_alternative<VerdictStmt>(body)) {
        result.report = session.verdict();
      } else if (const auto* s = std::get_if<SumStmt>(&body)) {
        kslice::detail::require(options.max_sum_depth > 0, ErrorCode::invalid_argument,
                                "'sum' nesting too deep");
        const auto path = options.base_dir / s->path;
        RunOptions nested = options;
        nested.base_dir = path.parent_path();
        --nested.max_sum_depth;
        const auto sub = run_script(parse_script(read_file(path)), nested);
        kslice::detail::require(sub.session.has_value(), ErrorCode::invalid_argument,
                                "summand script '" + s->path + "' declares no knot");
        const auto summand = sub.report ? *sub.report : sub.session->verdict();
        session.apply(ConnectedSum{s->path, summand});
        result.report = session.state().report;
      } else {
        for (const auto& m : detail::moves_for(body, session)) session.apply(m);
        if (std::holds_alternative<EndgameStmt>(body)) result.report = session.state().report;
      }
    } catch (const ScriptError&) {
      throw;
    } catch (const ParseError& e) {
      throw rethrow(e, st);
    } catch (const Error& e) {
      throw rethrow(e, st);
    }
  }
  if (!result.session && (knot || declared_pieces)) {
    if (knot) result.session.emplace(*knot, options.engine);
    else result.session.emplace(pieces, options.engine);
  }
  return result;
}

inline RunResult run_script_file(const std::filesystem::path& path, RunOptions options = {}) {
  options.base_dir = path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path();
  return run_script(parse_script(read_file(path)), options);
}

}  // namespace kslice::script
