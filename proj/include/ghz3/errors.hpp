#pragma once

#include <stdexcept>
#include <string>

namespace ghz3 {

// Base of every error the library throws on a violated precondition.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedMode : public Error {
 public:
  using Error::Error;
};

class PathCollision : public Error {
 public:
  using Error::Error;
};

class NotNormalized : public Error {
 public:
  using Error::Error;
};

class NotUnitary : public Error {
 public:
  using Error::Error;
};

class QuadratureNotConverged : public Error {
 public:
  using Error::Error;
};

class FitDiverged : public Error {
 public:
  using Error::Error;
};

class NotEigenstate : public Error {
 public:
  using Error::Error;
};

class NoValidBranch : public Error {
 public:
  using Error::Error;
};

class MissingPair : public Error {
 public:
  using Error::Error;
};

// Raised while reading user configuration; the CLI maps it to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace ghz3
