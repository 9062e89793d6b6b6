#pragma once

#include <stdexcept>

namespace qpencil {

// Failure classes. The CLI maps the pencil/prime/resource/theorem classes to
// fixed exit codes; everything else is an ordinary argument or domain error.

struct argument_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A well-formed argument outside the mathematical domain of the operation
// (B < 3 in a bound evaluator, delta >= 3/392, violated s-formula constraint).
struct constraint_error : std::domain_error {
  using std::domain_error::domain_error;
};

// The two coefficient rows are Q-proportional: no curve at all.
struct degenerate_pencil_error : std::domain_error {
  using std::domain_error::domain_error;
};

// Some coefficient minor vanishes where a nonsingular curve is required.
struct singular_pencil_error : std::domain_error {
  using std::domain_error::domain_error;
};

// A prime of bad reduction was passed where a good one is required.
struct bad_prime_error : std::domain_error {
  using std::domain_error::domain_error;
};

struct resource_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An exact identity the theory guarantees failed to hold. Always a bug
// report: either in this library or in the caller's input assumptions.
struct theorem_violation_error : std::logic_error {
  using std::logic_error::logic_error;
};

// Input outside the range this tool can certify (e.g. primality of integers
// beyond the deterministic witness range).
struct unsupported_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace qpencil
