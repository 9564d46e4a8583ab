#ifndef RVSDG_ERROR_HPP
#define RVSDG_ERROR_HPP

#include <stdexcept>
#include <string>

namespace rvsdg
{

class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Raised by graph-editing primitives on type mismatches or illegal removals.
class GraphError : public Error
{
public:
  using Error::Error;
};

/// Raised when a pass or translation step observes a broken internal invariant.
class InvariantError : public Error
{
public:
  using Error::Error;
};

class ParseError : public Error
{
public:
  ParseError(const std::string & message, std::size_t line, std::size_t column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column)
  {}

  [[nodiscard]] std::size_t
  line() const noexcept
  {
    return line_;
  }

  [[nodiscard]] std::size_t
  column() const noexcept
  {
    return column_;
  }

private:
  std::size_t line_;
  std::size_t column_;
};

}

#endif
