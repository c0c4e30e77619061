#pragma once

#include <stdexcept>
#include <string>

namespace paneldep {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Panel dimensions or values violate the model's preconditions.
class InvalidPanel : public Error {
  public:
    using Error::Error;
};

/// Pooled Gram matrix of the centered regressors is numerically singular.
class SingularDesign : public Error {
  public:
    using Error::Error;
};

/// A unit's residual series is numerically zero, so its correlations are undefined.
class DegenerateUnit : public Error {
  public:
    using Error::Error;
};

/// A per-unit design Gram matrix is singular (needed by the bias-adjusted LM test).
class SingularUnitDesign : public Error {
  public:
    using Error::Error;
};

/// The random-matrix LM variance is not positive at these dimensions.
class NonpositiveVariance : public Error {
  public:
    using Error::Error;
};

class ParseError : public Error {
  public:
    using Error::Error;
};

class UnbalancedPanel : public Error {
  public:
    using Error::Error;
};

class DuplicateRow : public Error {
  public:
    using Error::Error;
};

/// Simulation config or grid file is invalid; message names the line and field.
class ConfigError : public Error {
  public:
    using Error::Error;
};

} // namespace paneldep
