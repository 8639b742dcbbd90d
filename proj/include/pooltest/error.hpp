#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pooltest {

/// Base class for every error raised by the library. The CLI maps the
/// concrete subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The caller supplied malformed input (empty vectors, bad plans, bad config).
class InputError : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public InputError {
 public:
  EmptyInput() : InputError("probability vector is empty") {}
};

/// A probability at `index` (0-based) is not strictly inside (0,1).
class OutOfRange : public InputError {
 public:
  OutOfRange(std::size_t index, double value);

  std::size_t index() const noexcept { return index_; }
  double value() const noexcept { return value_; }

 private:
  std::size_t index_;
  double value_;
};

class NotSorted : public InputError {
 public:
  using InputError::InputError;
};

class UnknownFormat : public InputError {
 public:
  explicit UnknownFormat(const std::string& name)
      : InputError("unknown format '" + name + "'") {}
};

/// An exhaustive search was requested on an instance above its size guard.
class InstanceTooLarge : public Error {
 public:
  InstanceTooLarge(std::size_t n, std::size_t limit);

  std::size_t size() const noexcept { return n_; }
  std::size_t limit() const noexcept { return limit_; }

 private:
  std::size_t n_;
  std::size_t limit_;
};

}  // namespace pooltest
