#pragma once

#include <stdexcept>
#include <string>

namespace concept_align {

enum class ErrorKind {
  Template,
  Parse,
  Validation,
  Data,
  ShapeMismatch,
  EmptyClass,
  DegenerateVector,
  MissingData,
  EmptyInput,
  Io,
  // ACTV1 decoding failures.
  BadMagic,
  UnsupportedVersion,
  UnsupportedDtype,
  HeaderLength,
  TruncatedPayload,
  TrailingBytes,
  NonFinite,
};

const char* to_string(ErrorKind kind) noexcept;

// True for failures that come from reading or decoding external input
// (file system, malformed files); false for contract violations on
// otherwise well-formed data.
bool is_io_or_parse(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace concept_align
