#pragma once

#include <stdexcept>
#include <string>

namespace laxhopf {

// Base for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An evaluator returned NaN, or an arithmetic step would have produced one.
class EvaluationFault : public Error {
 public:
  using Error::Error;
};

// A precondition of the called operation does not hold.
class MisuseError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class DegenerateWindow : public Error {
 public:
  using Error::Error;
};

// Every lattice point has infinite cost, so the conjugate would be -inf.
class EmptyDomain : public Error {
 public:
  using Error::Error;
};

class RateOverflow : public Error {
 public:
  using Error::Error;
};

// Invalid configuration. `path` names the offending field ("cost.name").
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& what)
      : Error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace laxhopf
