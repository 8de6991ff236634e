#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rotlab {

/// Base of every physics-level refusal raised by the library. The CLI maps
/// these to exit code 3.
class PhysicsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a formula (Q < 0, non-timelike vector, ...).
class DomainError : public PhysicsError {
public:
    using PhysicsError::PhysicsError;
};

/// A chart or kinematic singularity: 1 - n.v -> 0, |v| -> 1, a non-smooth
/// point of the shape function, a rotationless state where a limit does not
/// exist.
class SingularityError : public PhysicsError {
public:
    using PhysicsError::PhysicsError;
};

/// Parameters for which a requested solution branch does not exist.
class InadmissibleError : public PhysicsError {
public:
    using PhysicsError::PhysicsError;
};

/// Raised when accelerations are requested from a singular velocity Hessian.
/// Carries the numeric null space and the Hessian-constraint value so callers
/// can inspect the degeneracy instead of just failing.
class DegenerateHessian : public PhysicsError {
public:
    DegenerateHessian(const std::string& what, std::vector<std::vector<double>> kernel,
                      double constraint_value, int rank)
        : PhysicsError(what), kernel_(std::move(kernel)), constraint_(constraint_value), rank_(rank) {}

    const std::vector<std::vector<double>>& kernel() const noexcept { return kernel_; }
    /// -w.Z for the first kernel vector w (same convention as
    /// constraint_functional).
    double constraint_value() const noexcept { return constraint_; }
    int rank() const noexcept { return rank_; }

private:
    std::vector<std::vector<double>> kernel_;
    double constraint_;
    int rank_;
};

/// Malformed scenario documents. Exit code 2.
class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace rotlab
