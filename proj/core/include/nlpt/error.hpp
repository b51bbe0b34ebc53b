#pragma once

#include <stdexcept>
#include <string>

namespace nlpt {

/// Caller supplied an argument outside an operation's documented domain.
class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed external input (spec files, grid files). Maps to CLI exit code 2.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A library invariant was broken (e.g. the eigensolver sweep cap).
class InternalDefect : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace nlpt
