#pragma once

#include <stdexcept>
#include <string>

namespace thompson {

/// Bad user-supplied input: out-of-range indices, malformed words, wrong shapes.
struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Boundary or arity mismatch when gluing diagrams.
struct CompositionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A state space or workload exceeded a configured cap.
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An internal invariant failed. Always a bug signal, never a valid outcome.
struct InvariantError : std::logic_error {
  using std::logic_error::logic_error;
};

/// The evaluator could not be normalised at the requested parameter.
struct CalibrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numerical data contradicts a structural property (unbounded moments,
/// eigenvalue clusters straddling the unit circle).
struct InconsistencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void ensure(bool condition, const std::string& what) {
  if (!condition) throw InvariantError(what);
}

}  // namespace thompson
