#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sturmslater {

/// Parse failure; carries the byte offset of the offending token and a
/// description of what would have been accepted there.
class SyntaxError : public std::runtime_error {
public:
    SyntaxError(std::size_t offset, std::string expected)
        : std::runtime_error("syntax error at offset " + std::to_string(offset) +
                             ": expected " + expected),
          offset_(offset),
          expected_(std::move(expected)) {}

    std::size_t offset() const noexcept { return offset_; }
    const std::string& expected() const noexcept { return expected_; }

private:
    std::size_t offset_;
    std::string expected_;
};

/// Division by zero or a non-finite intermediate during expression evaluation.
class EvalDomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Requested size exceeds the exact-arithmetic budget.
class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A computation that must produce a constant polynomial did not.
class NotConstant : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Adaptive ODE integration exceeded its step budget.
class IntegrationFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Eigenvalue bracketing ran out of admissible range.
class BracketFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Derivative order above the supported cap.
class OrderBudget : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A cross-checked identity failed its tolerance; indicates a sign-convention
/// or solver bug, not bad input.
class VerificationFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A coefficient vector that must be nonzero was zero.
class ZeroVector : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// All sign-normalization probe determinants were too small to trust.
class DegenerateProbe : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A determinant fell below the conditioning threshold.
class NearSingular : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Multiplicity probing exhausted the order budget without finding a nonzero
/// derivative. Never expected for nontrivial combinations; surfaced loudly.
class UnresolvedZero : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sturmslater
