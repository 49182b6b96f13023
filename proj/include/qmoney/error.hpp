#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qmoney {

enum class ErrorKind {
  DimensionMismatch,
  NotHermitian,
  TraceNotOne,
  NotNormalized,
  Indeterminate,
  NonHermitianResult,
  NoConvergence,
  SingularLagrange,
  NotAxiallySymmetric,
  OutOfRange,
  OffAxisClone,
  UnmappableColor,
  EmptyBanknote,
  Parse,
  MissingChi,
  GridMismatch,
  Io,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so front ends can map it
// to an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace qmoney
