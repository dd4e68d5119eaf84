#pragma once

#include <stdexcept>
#include <string>

namespace aoi {

/// Raised when caller-supplied parameters violate a model invariant
/// (unstable server, routing probabilities that do not sum to one, ...).
class InvalidInput : public std::invalid_argument
{
public:
    explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

/// Raised when a numerical procedure cannot deliver its result
/// (root not bracketed, divergent integral, ...).
class NumericalFailure : public std::runtime_error
{
public:
    explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace aoi
