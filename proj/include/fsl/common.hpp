#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fsl {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid input: a precondition on arguments does not hold.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A numerical self-check fired (e.g. the zero-count audit).
class AuditAlarm : public Error {
 public:
  using Error::Error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw ValidationError(what);
}

}  // namespace fsl
