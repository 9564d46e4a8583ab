#include <rvsdg/error.hpp>
#include <rvsdg/operation.hpp>

#include <array>
#include <bit>
#include <charconv>

namespace rvsdg
{

namespace
{

constexpr std::array<std::string_view, 29> opcode_names = {
  "add",  "sub",  "mul",   "div",     "rem",   "shl",    "shr",   "and",   "or",    "xor",
  "neg",  "eq",   "ne",    "lt",      "le",    "gt",     "ge",    "zext",  "sext",  "trunc",
  "const", "undef", "match", "ctl2int", "alloca", "load", "store", "gep",   "apply"
};

void
require(bool condition, const std::string & message)
{
  if (!condition)
    throw GraphError(message);
}

std::string
format_double(double value)
{
  std::array<char, 64> buffer{};
  auto [end, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
  std::string text(buffer.data(), end);
  if (text.find_first_of(".eEn") == std::string::npos)
    text += ".0";
  return text;
}

}

std::uint64_t
mask_to_width(std::uint64_t bits, unsigned width) noexcept
{
  if (width >= 64)
    return bits;
  return bits & ((std::uint64_t(1) << width) - 1);
}

std::int64_t
sign_extend(std::uint64_t bits, unsigned width) noexcept
{
  if (width >= 64)
    return static_cast<std::int64_t>(bits);
  auto shift = 64 - width;
  return static_cast<std::int64_t>(bits << shift) >> shift;
}

std::string_view
opcode_name(OpCode code) noexcept
{
  return opcode_names[static_cast<std::size_t>(code)];
}

std::optional<OpCode>
opcode_from_name(std::string_view name)
{
  for (std::size_t n = 0; n < opcode_names.size(); n++)
  {
    if (opcode_names[n] == name)
      return static_cast<OpCode>(n);
  }
  return std::nullopt;
}

Operation
Operation::binary(OpCode code, Type operand)
{
  require(code <= OpCode::Xor, "not a binary opcode");
  auto kind = operand.kind();
  if (kind == TypeKind::Float)
  {
    require(
        code == OpCode::Add || code == OpCode::Sub || code == OpCode::Mul || code == OpCode::Div
            || code == OpCode::Rem,
        std::string(opcode_name(code)) + " is not defined on f64");
  }
  else
  {
    require(kind == TypeKind::Integer, std::string(opcode_name(code)) + " needs integer operands");
  }
  Operation op;
  op.code_ = code;
  op.type_ = operand;
  op.result_type_ = operand;
  return op;
}

Operation
Operation::neg(Type operand)
{
  require(
      operand.kind() == TypeKind::Integer || operand.kind() == TypeKind::Float,
      "neg needs a numeric operand");
  Operation op;
  op.code_ = OpCode::Neg;
  op.type_ = operand;
  op.result_type_ = operand;
  return op;
}

Operation
Operation::compare(OpCode code, Type operand)
{
  require(code >= OpCode::Eq && code <= OpCode::Ge, "not a comparison opcode");
  auto kind = operand.kind();
  require(
      kind == TypeKind::Integer || kind == TypeKind::Float || kind == TypeKind::Pointer,
      "comparison needs integer, float or pointer operands");
  Operation op;
  op.code_ = code;
  op.type_ = operand;
  op.result_type_ = Type::integer(1);
  return op;
}

Operation
Operation::convert(OpCode code, Type from, Type to)
{
  require(code >= OpCode::ZExt && code <= OpCode::Trunc, "not a conversion opcode");
  require(from.is_integer() && to.is_integer(), "conversions operate on integers");
  if (code == OpCode::Trunc)
    require(to.width() <= from.width(), "trunc cannot widen");
  else
    require(to.width() >= from.width(), "extension cannot narrow");
  Operation op;
  op.code_ = code;
  op.type_ = from;
  op.result_type_ = to;
  return op;
}

Operation
Operation::int_constant(Type type, std::uint64_t value)
{
  require(type.is_integer() || type.kind() == TypeKind::Pointer, "integer constant type");
  Operation op;
  op.code_ = OpCode::Constant;
  op.type_ = type;
  op.result_type_ = type;
  op.bits_ = mask_to_width(value, type.is_integer() ? type.width() : 64);
  return op;
}

Operation
Operation::float_constant(double value)
{
  Operation op;
  op.code_ = OpCode::Constant;
  op.type_ = Type::float64();
  op.result_type_ = op.type_;
  op.bits_ = std::bit_cast<std::uint64_t>(value);
  return op;
}

Operation
Operation::undef(Type type)
{
  require(type.is_value(), "undef of a state type");
  Operation op;
  op.code_ = OpCode::Undef;
  op.type_ = type;
  op.result_type_ = type;
  return op;
}

Operation
Operation::match(
    Type operand,
    std::vector<MatchCase> cases,
    unsigned default_alternative,
    unsigned alternatives)
{
  require(operand.is_integer(), "match needs an integer operand");
  require(alternatives >= 1, "match needs at least one alternative");
  require(default_alternative < alternatives, "match default out of range");
  for (auto & c : cases)
  {
    require(c.alternative < alternatives, "match case out of range");
    c.value = mask_to_width(c.value, operand.width());
  }
  Operation op;
  op.code_ = OpCode::Match;
  op.type_ = operand;
  op.result_type_ = Type::control(alternatives);
  op.cases_ = std::move(cases);
  op.default_ = default_alternative;
  op.alternatives_ = alternatives;
  return op;
}

Operation
Operation::ctl_to_int(unsigned alternatives, Type result)
{
  require(result.is_integer(), "ctl2int produces an integer");
  Operation op;
  op.code_ = OpCode::CtlToInt;
  op.type_ = Type::control(alternatives);
  op.result_type_ = result;
  op.alternatives_ = alternatives;
  return op;
}

Operation
Operation::alloca_op(Type element, std::uint64_t count)
{
  require(element.is_value() && !element.is_control(), "alloca element type");
  require(count >= 1, "alloca count must be positive");
  Operation op;
  op.code_ = OpCode::Alloca;
  op.type_ = element;
  op.result_type_ = Type::pointer();
  op.bits_ = count;
  return op;
}

Operation
Operation::load(Type value)
{
  require(value.is_value() && !value.is_control(), "load value type");
  Operation op;
  op.code_ = OpCode::Load;
  op.type_ = value;
  op.result_type_ = value;
  return op;
}

Operation
Operation::store(Type value)
{
  require(value.is_value() && !value.is_control(), "store value type");
  Operation op;
  op.code_ = OpCode::Store;
  op.type_ = value;
  op.result_type_ = Type::memory_state();
  return op;
}

Operation
Operation::gep(Type index)
{
  require(index.is_integer(), "gep index must be an integer");
  Operation op;
  op.code_ = OpCode::Gep;
  op.type_ = index;
  op.result_type_ = Type::pointer();
  return op;
}

Operation
Operation::apply(FunctionSignature signature)
{
  Operation op;
  op.code_ = OpCode::Apply;
  op.type_ = Type::function(std::move(signature));
  op.result_type_ = op.type_;
  return op;
}

double
Operation::float_value() const noexcept
{
  return std::bit_cast<double>(bits_);
}

unsigned
Operation::select(std::uint64_t value) const noexcept
{
  value = mask_to_width(value, type_.width());
  for (const auto & c : cases_)
  {
    if (c.value == value)
      return c.alternative;
  }
  return default_;
}

std::vector<Type>
Operation::input_types() const
{
  switch (code_)
  {
  case OpCode::Neg:
  case OpCode::ZExt:
  case OpCode::SExt:
  case OpCode::Trunc:
  case OpCode::Match:
  case OpCode::CtlToInt:
    return { type_ };
  case OpCode::Constant:
  case OpCode::Undef:
    return {};
  case OpCode::Alloca:
    return { Type::memory_state() };
  case OpCode::Load:
    return { Type::pointer(), Type::memory_state() };
  case OpCode::Store:
    return { Type::pointer(), type_, Type::memory_state() };
  case OpCode::Gep:
    return { Type::pointer(), type_ };
  case OpCode::Apply:
  {
    std::vector<Type> types{ type_ };
    for (const auto & p : type_.signature().parameters)
      types.push_back(p);
    types.push_back(Type::memory_state());
    types.push_back(Type::io_state());
    return types;
  }
  default:
    return { type_, type_ };
  }
}

std::vector<Type>
Operation::output_types() const
{
  switch (code_)
  {
  case OpCode::Alloca:
    return { Type::pointer(), Type::memory_state() };
  case OpCode::Load:
    return { type_, Type::memory_state() };
  case OpCode::Store:
    return { Type::memory_state() };
  case OpCode::Apply:
  {
    std::vector<Type> types = type_.signature().results;
    types.push_back(Type::memory_state());
    types.push_back(Type::io_state());
    return types;
  }
  default:
    return { result_type_ };
  }
}

std::string_view
Operation::name() const noexcept
{
  return opcode_name(code_);
}

std::string
Operation::str() const
{
  std::string s(name());
  switch (code_)
  {
  case OpCode::ZExt:
  case OpCode::SExt:
  case OpCode::Trunc:
  case OpCode::CtlToInt:
    return s + " " + type_.str() + " -> " + result_type_.str();
  case OpCode::Constant:
    if (type_.kind() == TypeKind::Float)
      return s + " f64 " + format_double(float_value());
    if (type_.is_integer() && type_.width() > 1)
      return s + " " + type_.str() + " " + std::to_string(sign_extend(bits_, type_.width()));
    return s + " " + type_.str() + " " + std::to_string(bits_);
  case OpCode::Match:
  {
    s += " " + type_.str() + " [";
    for (std::size_t n = 0; n < cases_.size(); n++)
    {
      if (n != 0)
        s += ", ";
      s += std::to_string(cases_[n].value) + " -> " + std::to_string(cases_[n].alternative);
    }
    s += "] default " + std::to_string(default_) + " : " + result_type_.str();
    return s;
  }
  case OpCode::Alloca:
    return s + " " + type_.str() + " " + std::to_string(bits_);
  default:
    return s + " " + type_.str();
  }
}

bool
Operation::is_commutative() const noexcept
{
  switch (code_)
  {
  case OpCode::Add:
  case OpCode::Mul:
  case OpCode::And:
  case OpCode::Or:
  case OpCode::Xor:
  case OpCode::Eq:
  case OpCode::Ne:
    return true;
  default:
    return false;
  }
}

bool
Operation::is_stateful() const noexcept
{
  switch (code_)
  {
  case OpCode::Alloca:
  case OpCode::Load:
  case OpCode::Store:
  case OpCode::Apply:
    return true;
  default:
    return false;
  }
}

bool
Operation::may_trap() const noexcept
{
  if (is_stateful())
    return true;
  return (code_ == OpCode::Div || code_ == OpCode::Rem) && type_.is_integer();
}

bool
Operation::operator==(const Operation & other) const
{
  return code_ == other.code_ && type_ == other.type_ && result_type_ == other.result_type_
      && bits_ == other.bits_ && cases_ == other.cases_ && default_ == other.default_
      && alternatives_ == other.alternatives_;
}

}
