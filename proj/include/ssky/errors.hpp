#pragma once

#include <stdexcept>
#include <string>

namespace ssky {

// Base of every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DegeneratePair : public Error {
 public:
  using Error::Error;
};

class DuplicateSite : public Error {
 public:
  using Error::Error;
};

class OutOfDomain : public Error {
 public:
  using Error::Error;
};

class ClipEscape : public Error {
 public:
  using Error::Error;
};

class EmptyIndex : public Error {
 public:
  using Error::Error;
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ConsistencyFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace ssky
