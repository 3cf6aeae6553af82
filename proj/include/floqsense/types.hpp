#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace floqsense {

using Real = double;
using Complex = std::complex<Real>;

using Matrix2c = Eigen::Matrix<Complex, 2, 2>;
using Vector2c = Eigen::Matrix<Complex, 2, 1>;
using MatrixXr = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using MatrixXc = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
using VectorXr = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
using VectorXc = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

inline constexpr Real kPi = 3.14159265358979323846;
inline constexpr Complex kI{0.0, 1.0};

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A parameter violates its type invariants (odd N, |gamma| > 1, ...).
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// Bogoliubov angle undefined: both arguments of atan2 vanish.
class DegenerateAngle : public Error {
 public:
  using Error::Error;
};

/// Time stepping lost unitarity or normalization beyond tolerance.
class IntegratorFailure : public Error {
 public:
  using Error::Error;
};

/// An assembled object broke a sign/symmetry convention (e.g. K not antisymmetric).
class ConventionViolation : public Error {
 public:
  using Error::Error;
};

/// Inputs that must agree (block size, state label) do not.
class IncompatibleInput : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

class InvalidData : public Error {
 public:
  using Error::Error;
};

/// Unknown key, unparsable value or inconsistent experiment settings.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Requested dense computation is beyond the supported size.
class ResourceLimit : public Error {
 public:
  using Error::Error;
};

}  // namespace floqsense
