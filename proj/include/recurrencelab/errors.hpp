#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace recurrencelab
{

/// Root of every error raised by the library.
class error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument does not hold (range, alphabet mismatch, ...).
class argument_error : public error
{
public:
  using error::error;
};

/// A materialization, digit or position cap was exceeded.
class capacity_error : public error
{
public:
  using error::error;
};

/// Text could not be parsed; `position` is the 0-based offset of the failure.
class parse_error : public error
{
public:
  parse_error(const std::string& what, std::size_t position)
      : error(what + " at position " + std::to_string(position)), position_(position)
  {
  }

  std::size_t position() const noexcept { return position_; }

private:
  std::size_t position_;
};

/// The target lies outside the constructive case table, or has dimension zero.
class guard_error : public error
{
public:
  using error::error;
};

/// A bounded search (witness, threshold crossing) ran out of budget.
class search_error : public error
{
public:
  using error::error;
};

/// An insertion plan violates its structural conditions.
class plan_error : public error
{
public:
  using error::error;
};

} // namespace recurrencelab
