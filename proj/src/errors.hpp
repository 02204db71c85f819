#pragma once

#include <stdexcept>
#include <string>

namespace dleig {

// Numeric values are part of the C API (dleig_status in include/dleig.h).
enum class Status : int {
  Ok = 0,
  InvalidArgument = 1,
  ParseError = 2,
  ValidationError = 3,
  DegenerateElement = 4,
  EmptySystem = 5,
  DimensionMismatch = 6,
  NearSingular = 7,
  EigenvalueProximity = 8,
  ContourCollision = 9,
  AmbiguousTarget = 10,
  UnresolvedCluster = 11,
  Capacity = 12,
  IoError = 13,
  Internal = 14,
};

inline const char* status_name(Status s) {
  switch (s) {
    case Status::Ok: return "ok";
    case Status::InvalidArgument: return "invalid-argument";
    case Status::ParseError: return "parse-error";
    case Status::ValidationError: return "validation-error";
    case Status::DegenerateElement: return "degenerate-element";
    case Status::EmptySystem: return "empty-system";
    case Status::DimensionMismatch: return "dimension-mismatch";
    case Status::NearSingular: return "near-singular";
    case Status::EigenvalueProximity: return "eigenvalue-proximity";
    case Status::ContourCollision: return "contour-collision";
    case Status::AmbiguousTarget: return "ambiguous-target";
    case Status::UnresolvedCluster: return "unresolved-cluster";
    case Status::Capacity: return "capacity";
    case Status::IoError: return "io-error";
    case Status::Internal: return "internal";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  // index carries the offending pivot row or input line when meaningful.
  Error(Status code, const std::string& message, long index = -1)
      : std::runtime_error(message), code_(code), index_(index) {}

  Status code() const noexcept { return code_; }
  long index() const noexcept { return index_; }

 private:
  Status code_;
  long index_;
};

[[noreturn]] inline void fail(Status code, const std::string& message, long index = -1) {
  throw Error(code, message, index);
}

}  // namespace dleig
