#pragma once

#include <stdexcept>
#include <string>

namespace majlab {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An enumeration would exceed its configured cap.
struct CapExceeded : Error {
  using Error::Error;
};

/// Vector/support dimensions do not agree.
struct DimensionMismatch : Error {
  using Error::Error;
};

/// An exact (exhaustive) computation was requested for a dimension that is
/// too large to enumerate.
struct ExactTooLarge : Error {
  using Error::Error;
};

/// A dense matrix would exceed its configured size limit.
struct SizeExceeded : Error {
  using Error::Error;
};

/// An integer that must be even came out odd; signals an internal bug,
/// never a legal input.
struct ParityError : Error {
  using Error::Error;
};

/// Argument outside the mathematical domain of the operation.
struct DomainError : Error {
  using Error::Error;
};

struct DivisionByZero : Error {
  using Error::Error;
};

/// Token index outside the attention range.
struct IndexError : Error {
  using Error::Error;
};

} // namespace majlab
