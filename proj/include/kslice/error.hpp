#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace kslice {

/// Machine-readable failure reasons. The service layer forwards these on the
/// wire, so the spelling returned by `to_string` is part of the protocol.
enum class ErrorCode {
  parse,
  invalid_argument,
  generator_out_of_range,
  multi_component,
  not_symmetric,
  unknown_component,
  unknown_piece,
  invalid_locus,
  stale_piece,
  framing_not_unit,
  unknot_unverified,
  framing_mismatch,
  component_count_mismatch,
  not_isotopic,
  non_split_characteristic,
  not_spin,
  corrupted_state,
  empty_history,
  unknown_session,
  digest_mismatch,
  expect_failed,
  io,
  internal,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::parse: return "parse_error";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::generator_out_of_range: return "generator_out_of_range";
    case ErrorCode::multi_component: return "multi_component";
    case ErrorCode::not_symmetric: return "not_symmetric";
    case ErrorCode::unknown_component: return "unknown_component";
    case ErrorCode::unknown_piece: return "unknown_piece";
    case ErrorCode::invalid_locus: return "invalid_locus";
    case ErrorCode::stale_piece: return "stale_piece";
    case ErrorCode::framing_not_unit: return "framing_not_unit";
    case ErrorCode::unknot_unverified: return "unknot_unverified";
    case ErrorCode::framing_mismatch: return "framing_mismatch";
    case ErrorCode::component_count_mismatch: return "component_count_mismatch";
    case ErrorCode::not_isotopic: return "not_isotopic";
    case ErrorCode::non_split_characteristic: return "non_split_characteristic";
    case ErrorCode::not_spin: return "not_spin";
    case ErrorCode::corrupted_state: return "corrupted_state";
    case ErrorCode::empty_history: return "empty_history";
    case ErrorCode::unknown_session: return "unknown_session";
    case ErrorCode::digest_mismatch: return "digest_mismatch";
    case ErrorCode::expect_failed: return "expect_failed";
    case ErrorCode::io: return "io_error";
    case ErrorCode::internal: return "internal_error";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Syntax error in braid text or a move script. `offset` is a character
/// offset into the source; line/column are 1-based and 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t offset,
             std::size_t line = 0, std::size_t column = 0)
      : Error(ErrorCode::parse, format(message, offset, line, column)),
        message_(message), offset_(offset), line_(line), column_(column) {}

  const std::string& message() const noexcept { return message_; }
  std::size_t offset() const noexcept { return offset_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& message, std::size_t offset,
                            std::size_t line, std::size_t column) {
    if (line > 0) {
      return std::to_string(line) + ":" + std::to_string(column) + ": " + message;
    }
    return "offset " + std::to_string(offset) + ": " + message;
  }

  std::string message_;
  std::size_t offset_;
  std::size_t line_;
  std::size_t column_;
};

namespace detail {

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) throw Error(code, what);
}

}  // namespace detail
}  // namespace kslice
