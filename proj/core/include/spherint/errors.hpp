#pragma once

#include <stdexcept>
#include <string>

namespace spherint {

// Common base for every error the library throws deliberately.
class SpherintError : public std::runtime_error {
public:
    explicit SpherintError(const std::string& what) : std::runtime_error(what) {}
};

// Input outside the mathematical domain of an operation (point inside the
// support, transform argument past its branch endpoint, malformed measure...).
class DomainError : public SpherintError {
public:
    explicit DomainError(const std::string& what) : SpherintError(what) {}
};

// An iteration failed to reach its tolerance (root finder, Newton path,
// eigensolver sweep cap, quadrature depth cap).
class ConvergenceError : public SpherintError {
public:
    explicit ConvergenceError(const std::string& what) : SpherintError(what) {}
};

// A quantity that is positive in exact arithmetic came out non-positive;
// indicates the inputs are too degenerate for the requested computation.
class PrecisionError : public SpherintError {
public:
    explicit PrecisionError(const std::string& what) : SpherintError(what) {}
};

// Point-mass spectral measure passed to an operation whose limit degenerates
// there; callers that know the degenerate value substitute it themselves.
class DiracDegenerate : public SpherintError {
public:
    explicit DiracDegenerate(const std::string& what) : SpherintError(what) {}
};

} // namespace spherint
