#pragma once

#include <stdexcept>
#include <string>

namespace rplink {

/// Malformed input file (bad syntax, wrong header, unparsable number).
/// The message carries file/line/field context where known.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Structurally valid input that violates a model invariant.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Failure while talking to the external MILP engine.
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace rplink
