#ifndef LAXFLOW_ERRORS_HPP
#define LAXFLOW_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace laxflow {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A potential denominator fell below the separation floor (collision).
class SingularConfiguration : public Error {
 public:
  using Error::Error;
};

/// Lax machinery requested for a model with epsilon = 1 or g1, g2 terms.
class UnsupportedModel : public Error {
 public:
  UnsupportedModel() : Error("Lax machinery unsupported for this model") {}
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Power-trace order outside the admissible range.
class BadOrder : public Error {
 public:
  using Error::Error;
};

/// A coordinate or derived quantity left the finite range.
class NonFinite : public Error {
 public:
  using Error::Error;
};

/// Trajectory does not cover the requested period.
class SpanTooShort : public Error {
 public:
  using Error::Error;
};

class EigenFailure : public Error {
 public:
  using Error::Error;
};

/// Eigenvalue gap too small for eigenvector-based momenta.
class DegenerateSpectrum : public Error {
 public:
  using Error::Error;
};

/// A trace that must be real carried a non-negligible imaginary part.
class ImaginaryContamination : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent parameters / configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace laxflow

#endif  // LAXFLOW_ERRORS_HPP
