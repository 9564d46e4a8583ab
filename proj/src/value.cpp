#include <rvsdg/error.hpp>
#include <rvsdg/value.hpp>

#include <bit>
#include <charconv>
#include <cmath>
#include <deque>
#include <mutex>
#include <unordered_map>

namespace rvsdg
{

std::string_view
trap_name(TrapKind kind) noexcept
{
  switch (kind)
  {
  case TrapKind::None:
    return "none";
  case TrapKind::DivisionByZero:
    return "division-by-zero";
  case TrapKind::InvalidAddress:
    return "invalid-address";
  case TrapKind::OutOfFuel:
    return "out-of-fuel";
  case TrapKind::CallDepth:
    return "call-depth";
  case TrapKind::UnresolvedCallee:
    return "unresolved-callee";
  case TrapKind::InvalidFunction:
    return "invalid-function";
  }
  return "?";
}

const std::string *
intern_name(std::string_view name)
{
  static std::mutex mutex;
  static std::deque<std::string> storage;
  static std::unordered_map<std::string_view, const std::string *> index;

  std::lock_guard lock(mutex);
  if (auto it = index.find(name); it != index.end())
    return it->second;
  auto & stored = storage.emplace_back(name);
  index.emplace(stored, &stored);
  return &stored;
}

Value
Value::integer(unsigned width, std::uint64_t bits)
{
  return { TypeKind::Integer, width, mask_to_width(bits, width), nullptr };
}

Value
Value::float64(double value)
{
  return { TypeKind::Float, 64, std::bit_cast<std::uint64_t>(value), nullptr };
}

Value
Value::pointer(std::uint64_t address)
{
  return { TypeKind::Pointer, 64, address, nullptr };
}

Value
Value::control(unsigned alternatives, unsigned index)
{
  return { TypeKind::Control, alternatives, index, nullptr };
}

Value
Value::function_ref(std::string_view name)
{
  return { TypeKind::Function, 0, 0, intern_name(name) };
}

Value
Value::state(TypeKind kind)
{
  return { kind, 0, 0, nullptr };
}

Value
Value::zero(const Type & type)
{
  switch (type.kind())
  {
  case TypeKind::Integer:
    return integer(type.width(), 0);
  case TypeKind::Float:
    return float64(0.0);
  case TypeKind::Pointer:
    return pointer(0);
  case TypeKind::Control:
    return control(type.alternatives(), 0);
  case TypeKind::Function:
    return { TypeKind::Function, 0, 0, nullptr };
  default:
    return state(type.kind());
  }
}

std::int64_t
Value::signed_value() const noexcept
{
  return sign_extend(bits, width);
}

double
Value::as_double() const noexcept
{
  return std::bit_cast<double>(bits);
}

std::string
Value::str() const
{
  switch (kind)
  {
  case TypeKind::Integer:
    if (width == 1)
      return "i1 " + std::to_string(bits);
    return "i" + std::to_string(width) + " " + std::to_string(signed_value());
  case TypeKind::Float:
  {
    char buffer[64];
    auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), as_double());
    return "f64 " + std::string(buffer, end);
  }
  case TypeKind::Pointer:
    return "ptr " + std::to_string(bits);
  case TypeKind::Control:
    return "ctl(" + std::to_string(width) + ") " + std::to_string(bits);
  case TypeKind::Function:
    return function ? "@" + *function : "@<undef>";
  case TypeKind::MemoryState:
    return "mem";
  case TypeKind::IoState:
    return "io";
  }
  return "?";
}

bool
Value::operator==(const Value & other) const noexcept
{
  return kind == other.kind && width == other.width && bits == other.bits
      && function == other.function;
}

Value
parse_value(const Type & type, std::string_view text)
{
  auto fail = [&]() -> Value
  {
    throw Error("cannot read '" + std::string(text) + "' as " + type.str());
  };
  switch (type.kind())
  {
  case TypeKind::Integer:
  case TypeKind::Pointer:
  {
    std::int64_t signed_bits = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), signed_bits);
    if (ec != std::errc() || ptr != text.data() + text.size())
    {
      std::uint64_t unsigned_bits = 0;
      auto [uptr, uec] = std::from_chars(text.data(), text.data() + text.size(), unsigned_bits);
      if (uec != std::errc() || uptr != text.data() + text.size())
        return fail();
      signed_bits = static_cast<std::int64_t>(unsigned_bits);
    }
    if (type.kind() == TypeKind::Pointer)
      return Value::pointer(static_cast<std::uint64_t>(signed_bits));
    return Value::integer(type.width(), static_cast<std::uint64_t>(signed_bits));
  }
  case TypeKind::Float:
  {
    double value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
      return fail();
    return Value::float64(value);
  }
  case TypeKind::Function:
    if (text.size() < 2 || text[0] != '@')
      return fail();
    return Value::function_ref(text.substr(1));
  default:
    return fail();
  }
}

namespace
{

Value
evaluate_integer_binary(OpCode code, unsigned width, std::uint64_t a, std::uint64_t b)
{
  auto sa = sign_extend(a, width);
  auto sb = sign_extend(b, width);
  switch (code)
  {
  case OpCode::Add:
    return Value::integer(width, a + b);
  case OpCode::Sub:
    return Value::integer(width, a - b);
  case OpCode::Mul:
    return Value::integer(width, a * b);
  case OpCode::Div:
  case OpCode::Rem:
  {
    if (b == 0)
      throw Trap(TrapKind::DivisionByZero, "integer division by zero");
    if (sb == -1)
    {
      // wraps for the most negative value instead of overflowing
      if (code == OpCode::Div)
        return Value::integer(width, 0 - a);
      return Value::integer(width, 0);
    }
    if (code == OpCode::Div)
      return Value::integer(width, static_cast<std::uint64_t>(sa / sb));
    return Value::integer(width, static_cast<std::uint64_t>(sa % sb));
  }
  case OpCode::Shl:
    return Value::integer(width, a << (b % width));
  case OpCode::Shr:
    return Value::integer(width, static_cast<std::uint64_t>(sa >> (b % width)));
  case OpCode::And:
    return Value::integer(width, a & b);
  case OpCode::Or:
    return Value::integer(width, a | b);
  case OpCode::Xor:
    return Value::integer(width, a ^ b);
  default:
    throw InvariantError("not an integer binary operation");
  }
}

Value
evaluate_float_binary(OpCode code, double a, double b)
{
  switch (code)
  {
  case OpCode::Add:
    return Value::float64(a + b);
  case OpCode::Sub:
    return Value::float64(a - b);
  case OpCode::Mul:
    return Value::float64(a * b);
  case OpCode::Div:
    return Value::float64(a / b);
  case OpCode::Rem:
    return Value::float64(std::fmod(a, b));
  default:
    throw InvariantError("not a float binary operation");
  }
}

template<typename T>
bool
compare(OpCode code, T a, T b)
{
  switch (code)
  {
  case OpCode::Eq:
    return a == b;
  case OpCode::Ne:
    return a != b;
  case OpCode::Lt:
    return a < b;
  case OpCode::Le:
    return a <= b;
  case OpCode::Gt:
    return a > b;
  case OpCode::Ge:
    return a >= b;
  default:
    throw InvariantError("not a comparison");
  }
}

}

Value
evaluate(const Operation & op, std::span<const Value> inputs)
{
  const auto & type = op.type();
  switch (op.code())
  {
  case OpCode::Add:
  case OpCode::Sub:
  case OpCode::Mul:
  case OpCode::Div:
  case OpCode::Rem:
  case OpCode::Shl:
  case OpCode::Shr:
  case OpCode::And:
  case OpCode::Or:
  case OpCode::Xor:
    if (type.kind() == TypeKind::Float)
      return evaluate_float_binary(op.code(), inputs[0].as_double(), inputs[1].as_double());
    return evaluate_integer_binary(op.code(), type.width(), inputs[0].bits, inputs[1].bits);
  case OpCode::Neg:
    if (type.kind() == TypeKind::Float)
      return Value::float64(-inputs[0].as_double());
    return Value::integer(type.width(), 0 - inputs[0].bits);
  case OpCode::Eq:
  case OpCode::Ne:
  case OpCode::Lt:
  case OpCode::Le:
  case OpCode::Gt:
  case OpCode::Ge:
  {
    bool result = false;
    if (type.kind() == TypeKind::Float)
      result = compare(op.code(), inputs[0].as_double(), inputs[1].as_double());
    else if (type.kind() == TypeKind::Pointer)
      result = compare(op.code(), inputs[0].bits, inputs[1].bits);
    else
      result = compare(op.code(), inputs[0].signed_value(), inputs[1].signed_value());
    return Value::integer(1, result ? 1 : 0);
  }
  case OpCode::ZExt:
  case OpCode::Trunc:
    return Value::integer(op.result_type().width(), inputs[0].bits);
  case OpCode::SExt:
    return Value::integer(
        op.result_type().width(),
        static_cast<std::uint64_t>(inputs[0].signed_value()));
  case OpCode::Constant:
    if (type.kind() == TypeKind::Float)
      return Value::float64(op.float_value());
    if (type.kind() == TypeKind::Pointer)
      return Value::pointer(op.int_value());
    return Value::integer(type.width(), op.int_value());
  case OpCode::Undef:
    return Value::zero(type);
  case OpCode::Match:
    return Value::control(op.alternatives(), op.select(inputs[0].bits));
  case OpCode::CtlToInt:
    return Value::integer(op.result_type().width(), inputs[0].bits);
  case OpCode::Gep:
    return Value::pointer(inputs[0].bits + static_cast<std::uint64_t>(inputs[1].signed_value()));
  default:
    throw InvariantError("operation " + op.str() + " is not stateless");
  }
}

}
