#include "concept_align/error.hpp"

namespace concept_align {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Template: return "template error";
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::Validation: return "validation error";
    case ErrorKind::Data: return "data error";
    case ErrorKind::ShapeMismatch: return "shape mismatch";
    case ErrorKind::EmptyClass: return "empty class";
    case ErrorKind::DegenerateVector: return "degenerate vector";
    case ErrorKind::MissingData: return "missing data";
    case ErrorKind::EmptyInput: return "empty input";
    case ErrorKind::Io: return "i/o error";
    case ErrorKind::BadMagic: return "bad magic";
    case ErrorKind::UnsupportedVersion: return "unsupported version";
    case ErrorKind::UnsupportedDtype: return "unsupported dtype";
    case ErrorKind::HeaderLength: return "header length mismatch";
    case ErrorKind::TruncatedPayload: return "truncated payload";
    case ErrorKind::TrailingBytes: return "trailing bytes";
    case ErrorKind::NonFinite: return "non-finite value";
  }
  return "error";
}

bool is_io_or_parse(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Parse:
    case ErrorKind::Io:
    case ErrorKind::BadMagic:
    case ErrorKind::UnsupportedVersion:
    case ErrorKind::UnsupportedDtype:
    case ErrorKind::HeaderLength:
    case ErrorKind::TruncatedPayload:
    case ErrorKind::TrailingBytes:
    case ErrorKind::NonFinite:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace concept_align
