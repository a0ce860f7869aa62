#pragma once

#include <stdexcept>
#include <string>

namespace rainlane {

// Bad argument or configuration value supplied by the caller.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Unreadable, malformed or mismatched input data (files, manifests, shapes).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Non-finite values produced during training or inference.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace rainlane
