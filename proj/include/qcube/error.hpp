#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qcube {

enum class ErrorKind {
  DomainError,
  InvalidArgument,
  MixedParity,
  Overflow,
  CapacityExceeded,
  FeatureMissing,
  FormatError,
  ChecksumMismatch,
  EmptyInput,
  NotTwoLinked,
  NotInPreimage,
  InvalidGamma,
  MalformedCertificate,
  CaseMismatch,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::MixedParity: return "MixedParity";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::CapacityExceeded: return "CapacityExceeded";
    case ErrorKind::FeatureMissing: return "FeatureMissing";
    case ErrorKind::FormatError: return "FormatError";
    case ErrorKind::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::NotTwoLinked: return "NotTwoLinked";
    case ErrorKind::NotInPreimage: return "NotInPreimage";
    case ErrorKind::InvalidGamma: return "InvalidGamma";
    case ErrorKind::MalformedCertificate: return "MalformedCertificate";
    case ErrorKind::CaseMismatch: return "CaseMismatch";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a kind so callers (the CLI in
/// particular) can map it to an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  bool is_capacity() const noexcept {
    return kind_ == ErrorKind::CapacityExceeded || kind_ == ErrorKind::Overflow;
  }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace qcube
