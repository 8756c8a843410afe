#pragma once

#include <stdexcept>
#include <string>

namespace spdc {

// Every failure raised by the library derives from Error so callers that
// isolate per-row failures can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of the operation
/// (x >= 1, an efficiency outside [0, 1], a non-positive wavelength, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A ratio whose denominator vanishes, e.g. g2 of the signal+idler field at
/// zero pump. Rendered as a dash in tables rather than as infinity.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// Measured counts that no parameter set can produce (cc > min(sc1, sc2)).
class DataInconsistencyError : public Error {
 public:
  using Error::Error;
};

/// A series needs more terms than the hard cap, or a tally would overflow.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// The count-rate inversion did not reach its tolerance.
class InversionFailure : public Error {
 public:
  InversionFailure(const std::string& what, double best_residual)
      : Error(what), best_residual_(best_residual) {}

  [[nodiscard]] double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

/// Malformed input file. The message carries file and line context.
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace spdc
