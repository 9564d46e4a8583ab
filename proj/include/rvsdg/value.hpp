#ifndef RVSDG_VALUE_HPP
#define RVSDG_VALUE_HPP

#include <rvsdg/operation.hpp>
#include <rvsdg/type.hpp>

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace rvsdg
{

enum class TrapKind : std::uint8_t
{
  None,
  DivisionByZero,
  InvalidAddress,
  OutOfFuel,
  CallDepth,
  UnresolvedCallee,
  InvalidFunction
};

std::string_view
trap_name(TrapKind kind) noexcept;

/// Raised while interpreting; caught at the evaluator entry and reported in the result.
class Trap
{
public:
  Trap(TrapKind kind, std::string message)
      : kind_(kind),
        message_(std::move(message))
  {}

  [[nodiscard]] TrapKind
  kind() const noexcept
  {
    return kind_;
  }

  [[nodiscard]] const std::string &
  message() const noexcept
  {
    return message_;
  }

private:
  TrapKind kind_;
  std::string message_;
};

/// Interned function name; equal names share one address.
const std::string *
intern_name(std::string_view name);

/**
 * Runtime value of both evaluators. Integers are stored masked to their width, floats by their bit
 * pattern, pointers as cell addresses and control values as alternative indices. A function value
 * is the name of the function; a null name is the undefined function.
 */
struct Value
{
  TypeKind kind = TypeKind::Integer;
  unsigned width = 64;
  std::uint64_t bits = 0;
  const std::string * function = nullptr;

  static Value
  integer(unsigned width, std::uint64_t bits);

  static Value
  float64(double value);

  static Value
  pointer(std::uint64_t address);

  static Value
  control(unsigned alternatives, unsigned index);

  static Value
  function_ref(std::string_view name);

  static Value
  state(TypeKind kind);

  /// The value every undef of \p type evaluates to.
  static Value
  zero(const Type & type);

  [[nodiscard]] std::int64_t
  signed_value() const noexcept;

  [[nodiscard]] double
  as_double() const noexcept;

  /// "i64 -3", "f64 0.5", "ptr 17", "ctl(2) 1", "@f".
  [[nodiscard]] std::string
  str() const;

  bool
  operator==(const Value & other) const noexcept;
};

/// Reads a literal of \p type, e.g. "-3" for i64 or "@f" for a function type.
Value
parse_value(const Type & type, std::string_view text);

/// Evaluates a stateless operation. Throws Trap on division by zero.
Value
evaluate(const Operation & op, std::span<const Value> inputs);

}

#endif
