#pragma once

#include <stdexcept>
#include <string>

namespace negsim {

// Config documents, records or messages that violate a typed invariant.
// The message always names the offending field.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Operation called outside its stated preconditions.
class PreconditionError : public std::invalid_argument {
public:
    explicit PreconditionError(const std::string& msg) : std::invalid_argument(msg) {}
};

// A framed state whose redundant fields disagree with each other.
class InconsistencyError : public std::runtime_error {
public:
    explicit InconsistencyError(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace negsim
