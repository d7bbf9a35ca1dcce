#pragma once

#include <stdexcept>
#include <string>

namespace ergoscope {

  /// Base of every exception thrown by the library.
  class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
  };

  /// Malformed or inconsistent input (bad sizes, out-of-range indices, ...).
  class InvalidInput : public Error {
   public:
    using Error::Error;
  };

  /// A documented precondition of an operation does not hold.
  class PreconditionError : public Error {
   public:
    using Error::Error;
  };

  /// An enumeration exceeded its configured element cap.
  class SizeLimitError : public Error {
   public:
    SizeLimitError(std::string const& what, std::size_t cap)
        : Error(what), cap_(cap) {}

    std::size_t cap() const noexcept {
      return cap_;
    }

   private:
    std::size_t cap_;
  };

  /// A mathematical identity that must hold on every input failed. Always a
  /// bug (in the library or in the theory being checked), never user error.
  class InvariantViolation : public Error {
   public:
    using Error::Error;
  };

}  // namespace ergoscope
