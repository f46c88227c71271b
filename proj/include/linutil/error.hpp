#pragma once

#include <stdexcept>
#include <string>

namespace linutil {

/// Input violates a type invariant (bad probabilities, mismatched lengths, ...).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Operation called outside its domain (e.g. non-increasing returns where a
/// strictly increasing grid is required).
class PreconditionError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A postcondition the library guarantees did not hold. Indicates a bug or a
/// numerical breakdown, never bad input.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

namespace detail {

[[noreturn]] inline void fail_validation(const std::string& what) { throw ValidationError(what); }
[[noreturn]] inline void fail_precondition(const std::string& what) { throw PreconditionError(what); }
[[noreturn]] inline void fail_internal(const std::string& what) { throw InternalError(what); }

}  // namespace detail
}  // namespace linutil
