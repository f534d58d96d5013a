#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace migtk {

enum class ErrorKind {
  kInvalidInput,
  kInvalidArgument,
  kDimensionMismatch,
  kDegenerateInput,
  kParse,
  kUnsupportedFormat,
  kStructural,
  kUndefinedMetric,
  kIo,
};

const char* to_string(ErrorKind kind);

// Every error raised by the library. Parser errors carry a location: a byte
// offset for binary formats or a 1-based line number for text formats.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  static ParseError at_byte(std::uint64_t offset, const std::string& message);
  static ParseError at_line(std::uint64_t line, const std::string& message);

  std::optional<std::uint64_t> byte_offset() const noexcept { return byte_offset_; }
  std::optional<std::uint64_t> line() const noexcept { return line_; }

 private:
  ParseError(const std::string& message, std::optional<std::uint64_t> byte_offset,
             std::optional<std::uint64_t> line);

  std::optional<std::uint64_t> byte_offset_;
  std::optional<std::uint64_t> line_;
};

class UnsupportedFormatError : public Error {
 public:
  // `tag` names the offending TIFF tag or header field.
  UnsupportedFormatError(std::string tag, const std::string& message);

  const std::string& tag() const noexcept { return tag_; }

 private:
  std::string tag_;
};

}  // namespace migtk
