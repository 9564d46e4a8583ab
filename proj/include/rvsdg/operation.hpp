#ifndef RVSDG_OPERATION_HPP
#define RVSDG_OPERATION_HPP

#include <rvsdg/type.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rvsdg
{

enum class OpCode : std::uint8_t
{
  // binary arithmetic
  Add,
  Sub,
  Mul,
  Div,
  Rem,
  Shl,
  Shr,
  And,
  Or,
  Xor,
  // unary
  Neg,
  // comparisons, all producing i1
  Eq,
  Ne,
  Lt,
  Le,
  Gt,
  Ge,
  // conversions
  ZExt,
  SExt,
  Trunc,
  // nullary
  Constant,
  Undef,
  // predicates
  Match,
  CtlToInt,
  // memory
  Alloca,
  Load,
  Store,
  Gep,
  // calls
  Apply
};

struct MatchCase
{
  std::uint64_t value;
  unsigned alternative;

  bool
  operator==(const MatchCase &) const = default;
};

/**
 * Operator carried by a simple node.
 *
 * The operator fully determines the node's signature. Stateful operators thread the memory state
 * (load, store, alloca) or both states (apply) as trailing inputs and outputs.
 */
class Operation
{
public:
  static Operation
  binary(OpCode code, Type operand);

  static Operation
  neg(Type operand);

  static Operation
  compare(OpCode code, Type operand);

  static Operation
  convert(OpCode code, Type from, Type to);

  static Operation
  int_constant(Type type, std::uint64_t value);

  static Operation
  float_constant(double value);

  static Operation
  undef(Type type);

  /// Maps an integer onto control(alternatives); unmatched values select \p default_alternative.
  static Operation
  match(
      Type operand,
      std::vector<MatchCase> cases,
      unsigned default_alternative,
      unsigned alternatives);

  static Operation
  ctl_to_int(unsigned alternatives, Type result);

  static Operation
  alloca_op(Type element, std::uint64_t count);

  static Operation
  load(Type value);

  static Operation
  store(Type value);

  static Operation
  gep(Type index);

  static Operation
  apply(FunctionSignature signature);

  [[nodiscard]] OpCode
  code() const noexcept
  {
    return code_;
  }

  /// Operand type for arithmetic, comparisons and conversions; value type for memory operators.
  [[nodiscard]] const Type &
  type() const noexcept
  {
    return type_;
  }

  [[nodiscard]] const Type &
  result_type() const noexcept
  {
    return result_type_;
  }

  [[nodiscard]] std::uint64_t
  int_value() const noexcept
  {
    return bits_;
  }

  [[nodiscard]] double
  float_value() const noexcept;

  [[nodiscard]] std::uint64_t
  count() const noexcept
  {
    return bits_;
  }

  [[nodiscard]] const std::vector<MatchCase> &
  cases() const noexcept
  {
    return cases_;
  }

  [[nodiscard]] unsigned
  default_alternative() const noexcept
  {
    return default_;
  }

  [[nodiscard]] unsigned
  alternatives() const noexcept
  {
    return alternatives_;
  }

  [[nodiscard]] const FunctionSignature &
  signature() const
  {
    return type_.signature();
  }

  /// Alternative selected by an operand value (matched as an unsigned, width-masked integer).
  [[nodiscard]] unsigned
  select(std::uint64_t value) const noexcept;

  [[nodiscard]] std::vector<Type>
  input_types() const;

  [[nodiscard]] std::vector<Type>
  output_types() const;

  /// Mnemonic, e.g. "add" or "match".
  [[nodiscard]] std::string_view
  name() const noexcept;

  /// Mnemonic plus all attributes, e.g. "const i64 5" or "match i64 [0 -> 1] 0 : ctl(2)".
  [[nodiscard]] std::string
  str() const;

  [[nodiscard]] bool
  is_binary() const noexcept
  {
    return code_ <= OpCode::Xor;
  }

  [[nodiscard]] bool
  is_compare() const noexcept
  {
    return code_ >= OpCode::Eq && code_ <= OpCode::Ge;
  }

  [[nodiscard]] bool
  is_conversion() const noexcept
  {
    return code_ >= OpCode::ZExt && code_ <= OpCode::Trunc;
  }

  [[nodiscard]] bool
  is_commutative() const noexcept;

  /// Consumes and produces states.
  [[nodiscard]] bool
  is_stateful() const noexcept;

  /// May raise a trap for some operand values.
  [[nodiscard]] bool
  may_trap() const noexcept;

  [[nodiscard]] bool
  is_nullary() const noexcept
  {
    return code_ == OpCode::Constant || code_ == OpCode::Undef;
  }

  bool
  operator==(const Operation & other) const;

private:
  Operation() = default;

  OpCode code_ = OpCode::Constant;
  Type type_;
  Type result_type_;
  std::uint64_t bits_ = 0;
  std::vector<MatchCase> cases_;
  unsigned default_ = 0;
  unsigned alternatives_ = 0;
};

std::optional<OpCode>
opcode_from_name(std::string_view name);

std::string_view
opcode_name(OpCode code) noexcept;

/// Truncate \p bits to \p width bits.
std::uint64_t
mask_to_width(std::uint64_t bits, unsigned width) noexcept;

/// Sign-extend the low \p width bits of \p bits.
std::int64_t
sign_extend(std::uint64_t bits, unsigned width) noexcept;

}

#endif
