#pragma once

#include <stdexcept>
#include <string>

namespace fdl {

/// Input text could not be parsed (message carries line/element context).
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A requested object would exceed a size guard or overflow the index type.
class SizeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An operation was invoked outside its domain (empty graph, mismatched lengths, ...).
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A layout step produced non-finite coordinates.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace fdl
