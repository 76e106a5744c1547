#pragma once

#include <stdexcept>
#include <string>

namespace vring {

/// Base class for all library errors.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid or inconsistent configuration (bad parameter ranges, overlapping
/// blobs, misaligned time grids, malformed config files).
class ConfigError : public Error {
  public:
    using Error::Error;
};

/// Evaluation requested at a point where the kernel is singular
/// (coincident points, |x| = 0).
class SingularInputError : public Error {
  public:
    using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
  public:
    using Error::Error;
};

/// Adaptive quadrature could not reach the requested tolerance within the
/// node budget.  Carries the achieved error estimate.
class QuadratureError : public Error {
  public:
    QuadratureError(const std::string& msg, double achieved, double requested)
        : Error(msg), achieved_rel_error(achieved), requested_rel_error(requested) {}
    double achieved_rel_error;
    double requested_rel_error;
};

/// A blob could not be discretized (no lattice cell fell inside the disk).
class ResolutionError : public Error {
  public:
    using Error::Error;
};

/// Non-finite state encountered during integration.
class NumericError : public Error {
  public:
    using Error::Error;
};

/// A particle left the physical half-plane {r0 + x2 > 0}.
class DomainExitError : public Error {
  public:
    DomainExitError(const std::string& msg, int particle_id)
        : Error(msg), particle(particle_id) {}
    int particle;
};

/// Two point vortices arrived at (numerically) the same position.
class CollapseError : public Error {
  public:
    CollapseError(const std::string& msg, int i_, int j_) : Error(msg), i(i_), j(j_) {}
    int i;
    int j;
};

} // namespace vring
