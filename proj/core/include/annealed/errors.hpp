#pragma once

#include <stdexcept>
#include <string>

namespace annealed {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

class UnsupportedOperation : public Error {
 public:
  using Error::Error;
};

// A documented precondition (finite moments, integrable endpoints...) fails.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class DegenerateWeights : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  using Error::Error;
};

class NoApplicableBound : public Error {
 public:
  using Error::Error;
};

class StudyError : public Error {
 public:
  using Error::Error;
};

}  // namespace annealed

namespace annealed {

// Configuration error tied to a field path such as "target.alpha".
class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& detail)
      : Error(path.empty() ? detail : path + ": " + detail), path_(std::move(path)), detail_(detail) {}
  const std::string& path() const { return path_; }
  const std::string& detail() const { return detail_; }
  SchemaError prefixed(const std::string& prefix) const {
    return SchemaError(path_.empty() ? prefix : prefix + "." + path_, detail_);
  }

 private:
  std::string path_;
  std::string detail_;
};

}  // namespace annealed
