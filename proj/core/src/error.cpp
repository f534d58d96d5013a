#include "migtk/error.hpp"

namespace migtk {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidInput: return "invalid input";
    case ErrorKind::kInvalidArgument: return "invalid argument";
    case ErrorKind::kDimensionMismatch: return "dimension mismatch";
    case ErrorKind::kDegenerateInput: return "degenerate input";
    case ErrorKind::kParse: return "parse error";
    case ErrorKind::kUnsupportedFormat: return "unsupported format";
    case ErrorKind::kStructural: return "structural error";
    case ErrorKind::kUndefinedMetric: return "undefined metric";
    case ErrorKind::kIo: return "i/o error";
  }
  return "error";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind) {}

ParseError::ParseError(const std::string& message, std::optional<std::uint64_t> byte_offset,
                       std::optional<std::uint64_t> line)
    : Error(ErrorKind::kParse, message), byte_offset_(byte_offset), line_(line) {}

ParseError ParseError::at_byte(std::uint64_t offset, const std::string& message) {
  return ParseError("byte " + std::to_string(offset) + ": " + message, offset, std::nullopt);
}

ParseError ParseError::at_line(std::uint64_t line, const std::string& message) {
  return ParseError("line " + std::to_string(line) + ": " + message, std::nullopt, line);
}

UnsupportedFormatError::UnsupportedFormatError(std::string tag, const std::string& message)
    : Error(ErrorKind::kUnsupportedFormat, message + " [" + tag + "]"), tag_(std::move(tag)) {}

}  // namespace migtk
