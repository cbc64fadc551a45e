#ifndef STAGEDTREE_ERROR_HPP
#define STAGEDTREE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace stagedtree {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad user input: malformed data, inconsistent arguments, invariant violations.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Malformed or incompatible serialized content (model files, DAG files).
class FormatError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

} // namespace stagedtree

#endif
