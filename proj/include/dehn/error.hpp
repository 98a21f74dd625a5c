#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dehn {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidWord : public Error {
 public:
  using Error::Error;
};

/// A metric or BFS query needed a radius beyond the configured cap.
class CapExceeded : public Error {
 public:
  CapExceeded(const std::string& what, std::int64_t cap)
      : Error(what + " (cap " + std::to_string(cap) + ")"), cap_(cap) {}
  std::int64_t cap() const noexcept { return cap_; }

 private:
  std::int64_t cap_;
};

class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class OverflowError : public Error {
 public:
  using Error::Error;
};

class Unsupported : public Error {
 public:
  using Error::Error;
};

class SamplerFailure : public Error {
 public:
  SamplerFailure(const std::string& what, std::int64_t attempts)
      : Error(what + " after " + std::to_string(attempts) + " attempts"),
        attempts_(attempts) {}
  std::int64_t attempts() const noexcept { return attempts_; }

 private:
  std::int64_t attempts_;
};

}  // namespace dehn
