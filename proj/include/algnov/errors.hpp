#pragma once

#include <stdexcept>
#include <string>

namespace algnov {

/// Base class for every error raised by the engine.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Dimension mismatch, invalid window parameters and similar caller mistakes.
class InvalidArgument : public Error {
  public:
    using Error::Error;
};

/// A differential failed d∘d = 0 or a structure constant came out non-integral.
/// Always indicates an upstream arithmetic bug.
class ConsistencyError : public Error {
  public:
    using Error::Error;
};

/// The coefficient precision K is too small for the requested page range.
class PrecisionExhausted : public Error {
  public:
    using Error::Error;
};

/// A window exceeds the configured size guard.
class WindowTooLarge : public Error {
  public:
    using Error::Error;
};

/// A stored artifact does not match its recorded checksum or window.
class IntegrityError : public Error {
  public:
    using Error::Error;
};

}  // namespace algnov
