#pragma once

#include <stdexcept>
#include <string>

namespace bscope {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: corpus schema, config, checkpoint or overlay files.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Structurally valid input that violates a cross-reference invariant.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

// Caller violated an operation precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace bscope
