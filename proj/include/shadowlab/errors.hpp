#pragma once

#include <stdexcept>
#include <string>

namespace shadowlab {

enum class ErrorKind {
  input,
  degenerate_body,
  inconclusive_distance,
  resource,
  construction_failed,
  search_failed,
  escape_not_found,
  dependency,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(ErrorKind::input, what) {}
};

class DegenerateBodyError : public Error {
 public:
  explicit DegenerateBodyError(const std::string& what) : Error(ErrorKind::degenerate_body, what) {}
};

// Iterative distance did not converge; [lower, upper] still brackets the true distance.
class InconclusiveDistanceError : public Error {
 public:
  InconclusiveDistanceError(double lower, double upper);
  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }

 private:
  double lower_;
  double upper_;
};

class ResourceError : public Error {
 public:
  ResourceError(const std::string& what, double required_delta, double estimated_size)
      : Error(ErrorKind::resource, what), required_delta_(required_delta), estimated_size_(estimated_size) {}
  double required_delta() const noexcept { return required_delta_; }
  double estimated_size() const noexcept { return estimated_size_; }

 private:
  double required_delta_;
  double estimated_size_;
};

}  // namespace shadowlab
