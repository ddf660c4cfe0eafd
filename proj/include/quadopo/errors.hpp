#pragma once

#include <stdexcept>
#include <string>

namespace quadopo {

// Base class for all quadopo failures.  Two broad families:
//   * usage errors (bad parameters, wrong method for the given couplings)
//     -> the CLI maps these to exit code 2;
//   * computation errors (unstable operating point, non-convergence,
//     diverging trajectories) -> exit code 1.
// `name()` is the stable identifier printed on stderr by the CLI.
class Error : public std::runtime_error {
  public:
    Error(std::string name, const std::string& msg)
        : std::runtime_error(msg), name_(std::move(name)) {}
    const std::string& name() const noexcept { return name_; }

  private:
    std::string name_;
};

struct UsageError : Error {
    using Error::Error;
};

struct ComputationError : Error {
    using Error::Error;
};

// Parameter outside its admissible domain (negative decay rate, ...).
struct DomainError : UsageError {
    explicit DomainError(const std::string& msg) : UsageError("DomainError", msg) {}
};

// A closed form valid only for fully symmetric parameters was requested
// with asymmetric ones.
struct SymmetryError : UsageError {
    explicit SymmetryError(const std::string& msg) : UsageError("SymmetryError", msg) {}
};

// A closed-form propagator was requested for couplings that lack the
// required symmetry (all equal, or equal in adjacent pairs).
struct MethodMismatch : UsageError {
    explicit MethodMismatch(const std::string& msg) : UsageError("MethodMismatch", msg) {}
};

// Covariance data on the optimization boundary: gain formulas would
// divide by ~0.
struct DegenerateCovariance : UsageError {
    explicit DegenerateCovariance(const std::string& msg)
        : UsageError("DegenerateCovariance", msg) {}
};

// Operating point has a fluctuation eigenvalue with non-negative real part.
struct Unstable : ComputationError {
    explicit Unstable(const std::string& msg) : ComputationError("Unstable", msg) {}
};

// Iterative routine exhausted its budget without meeting tolerance.
struct NoConvergence : ComputationError {
    explicit NoConvergence(const std::string& msg) : ComputationError("NoConvergence", msg) {}
};

// A state claimed to be stationary fails the residual check.
struct NotAFixedPoint : ComputationError {
    explicit NotAFixedPoint(const std::string& msg) : ComputationError("NotAFixedPoint", msg) {}
};

// A single stochastic trajectory crossed the divergence threshold.
struct Diverged : ComputationError {
    explicit Diverged(const std::string& msg) : ComputationError("Diverged", msg) {}
};

// More than the tolerated fraction of stochastic trajectories escaped
// to numerical infinity.
struct TooManyDivergences : ComputationError {
    explicit TooManyDivergences(const std::string& msg)
        : ComputationError("TooManyDivergences", msg) {}
};

} // namespace quadopo
