#include <rvsdg/machine.hpp>

#include <algorithm>

namespace rvsdg
{

namespace
{

std::string
format_call(const std::string & name, const std::vector<Value> & arguments)
{
  std::string s = "@" + name + "(";
  for (std::size_t n = 0; n < arguments.size(); n++)
  {
    if (n != 0)
      s += ", ";
    s += arguments[n].str();
  }
  return s + ")";
}

Value
reinterpret(const Type & type, const Value & stored)
{
  if (type.kind() == TypeKind::Function)
  {
    if (stored.kind != TypeKind::Function)
      throw Trap(TrapKind::InvalidFunction, "loaded a non-function value as " + type.str());
    return stored;
  }
  if (stored.kind == TypeKind::Function)
    throw Trap(TrapKind::InvalidFunction, "loaded a function value as " + type.str());
  switch (type.kind())
  {
  case TypeKind::Integer:
    return Value::integer(type.width(), stored.bits);
  case TypeKind::Float:
    return { TypeKind::Float, 64, stored.bits, nullptr };
  default:
    return Value::pointer(stored.bits);
  }
}

}

std::string
Event::str() const
{
  switch (kind)
  {
  case EventKind::Load:
    return "load " + std::to_string(address);
  case EventKind::Store:
    return "store " + std::to_string(address) + " " + value.str();
  case EventKind::Call:
    return "call " + format_call(name, arguments);
  case EventKind::Io:
    return "io " + format_call(name, arguments);
  }
  return "?";
}

bool
Event::operator==(const Event & other) const
{
  return kind == other.kind && address == other.address && value == other.value
      && name == other.name && arguments == other.arguments;
}

std::string
serialize_trace(const Trace & trace)
{
  std::string text;
  for (const auto & event : trace)
    text += event.str() + "\n";
  return text;
}

Value
Machine::allocate(std::uint64_t count)
{
  auto base = next_address_;
  blocks_.push_back({ base, count });
  next_address_ += count + 1;
  return Value::pointer(base);
}

void
Machine::check_address(std::uint64_t address) const
{
  auto it = std::upper_bound(
      blocks_.begin(),
      blocks_.end(),
      address,
      [](std::uint64_t a, const Block & block)
      {
        return a < block.base;
      });
  if (it == blocks_.begin() || address - std::prev(it)->base >= std::prev(it)->size)
    throw Trap(TrapKind::InvalidAddress, "access to invalid address " + std::to_string(address));
}

Value
Machine::load(const Type & type, const Value & address)
{
  check_address(address.bits);
  Event event;
  event.kind = EventKind::Load;
  event.address = address.bits;
  trace_.push_back(std::move(event));
  auto it = cells_.find(address.bits);
  if (it == cells_.end())
    return Value::zero(type);
  return reinterpret(type, it->second);
}

void
Machine::store(const Value & address, const Value & value)
{
  check_address(address.bits);
  Event event;
  event.kind = EventKind::Store;
  event.address = address.bits;
  event.value = value;
  trace_.push_back(std::move(event));
  cells_[address.bits] = value;
}

std::vector<Value>
Machine::call_external(
    const std::string & name,
    const FunctionSignature & signature,
    std::span<const Value> arguments)
{
  Event event;
  event.name = name;
  event.arguments.assign(arguments.begin(), arguments.end());
  if (name == "print" && signature.results.empty())
  {
    event.kind = EventKind::Io;
    trace_.push_back(std::move(event));
    return {};
  }
  if (name == "input" && signature.parameters.empty() && signature.results.size() == 1
      && signature.results[0].is_integer())
  {
    // deterministic stand-in for external input: the current trace length
    auto value = Value::integer(signature.results[0].width(), trace_.size());
    event.kind = EventKind::Call;
    trace_.push_back(std::move(event));
    return { value };
  }
  throw Trap(TrapKind::UnresolvedCallee, "no built-in external @" + name);
}

void
Machine::enter_call()
{
  if (depth_ >= max_call_depth)
    throw Trap(TrapKind::CallDepth, "call depth limit exceeded");
  depth_++;
}

std::string
EvalResult::str() const
{
  std::string text;
  if (!ok())
    text += "trap " + std::string(trap_name(trap)) + ": " + trap_message + "\n";
  for (const auto & value : results)
    text += "result " + value.str() + "\n";
  return text + serialize_trace(trace);
}

std::optional<std::string>
compare_behavior(const EvalResult & source, const EvalResult & target)
{
  if (!source.ok())
    return std::nullopt;
  if (!target.ok())
    return "target trapped (" + std::string(trap_name(target.trap)) + ": " + target.trap_message
         + ") where source returned";
  if (source.results != target.results)
  {
    std::string s = "results differ:";
    for (const auto & v : source.results)
      s += " " + v.str();
    s += " vs";
    for (const auto & v : target.results)
      s += " " + v.str();
    return s;
  }
  auto length = std::min(source.trace.size(), target.trace.size());
  for (std::size_t n = 0; n < length; n++)
  {
    if (!(source.trace[n] == target.trace[n]))
      return "trace event " + std::to_string(n) + " differs: " + source.trace[n].str() + " vs "
           + target.trace[n].str();
  }
  if (source.trace.size() != target.trace.size())
    return "trace lengths differ: " + std::to_string(source.trace.size()) + " vs "
         + std::to_string(target.trace.size());
  return std::nullopt;
}

}
