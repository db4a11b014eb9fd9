#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rvbubble {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An interval whose (realized) volatility is at or below the floor.
class DegenerateVolatility : public Error {
 public:
  DegenerateVolatility(std::size_t interval, double vol)
      : Error("degenerate volatility " + std::to_string(vol) + " in interval " +
              std::to_string(interval)),
        interval_(interval) {}

  /// 1-based index of the offending low-frequency interval.
  std::size_t interval() const noexcept { return interval_; }

 private:
  std::size_t interval_;
};

/// The DF regression has zero residual variance or a constant regressor.
class DegenerateRegression : public Error {
 public:
  using Error::Error;
};

/// Input data could not be parsed or failed validation.
class DataError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgument(what);
}

}  // namespace detail

}  // namespace rvbubble
