#pragma once

#include <stdexcept>
#include <string>

namespace reactnet {

// Base of every error thrown by the toolkit. Input/usage problems and numeric
// failures are kept apart so the command-line front end can map them to
// distinct exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class SizeMismatchError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class SpecError : public Error {
 public:
  using Error::Error;
};

class BoundsError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ParamError : public Error {
 public:
  using Error::Error;
};

// Non-finite values appearing during optimisation.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace reactnet
