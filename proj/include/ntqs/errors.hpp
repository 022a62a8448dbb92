#pragma once

#include <stdexcept>
#include <string>

namespace ntqs {

// Process exit codes used by the command-line front end.
enum class exit_status : int {
  ok = 0,
  domain = 2,
  capacity = 3,
  convergence = 4,
  extraction = 5,
};

class error : public std::runtime_error {
public:
  explicit error(const std::string& what) : std::runtime_error(what) {}
  virtual exit_status status() const noexcept = 0;
};

// Argument outside the mathematical domain of an operation.
class domain_error : public error {
public:
  using error::error;
  exit_status status() const noexcept override { return exit_status::domain; }
};

// A state whose support would be empty.
class empty_state_error : public domain_error {
public:
  using domain_error::domain_error;
};

// Too few samples for the requested number of fit parameters.
class underdetermined_error : public domain_error {
public:
  using domain_error::domain_error;
};

// Request exceeds a table limit or a dimension cap.
class capacity_error : public error {
public:
  using error::error;
  exit_status status() const noexcept override { return exit_status::capacity; }
};

class convergence_error : public error {
public:
  using error::error;
  exit_status status() const noexcept override { return exit_status::convergence; }
};

// Peak inversion found no integer solution consistent with the inputs.
class extraction_error : public error {
public:
  using error::error;
  exit_status status() const noexcept override { return exit_status::extraction; }
};

namespace detail {

template <class E>
[[noreturn]] inline void fail(const std::string& msg) {
  throw E(msg);
}

template <class E>
inline void require(bool cond, const std::string& msg) {
  if (!cond) throw E(msg);
}

}  // namespace detail
}  // namespace ntqs
