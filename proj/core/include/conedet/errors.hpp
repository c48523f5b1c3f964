#pragma once

#include <stdexcept>
#include <string>

namespace conedet {

/// Argument outside the domain of a function (excluded branch points,
/// Im sigma <= 0, points on a branch cut).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// An iterative or series evaluation did not reach its accuracy target.
class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

/// Internal consistency check failed (branch selection, normalization).
class InternalError : public std::logic_error {
public:
    explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace conedet
