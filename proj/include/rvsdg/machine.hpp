#ifndef RVSDG_MACHINE_HPP
#define RVSDG_MACHINE_HPP

#include <rvsdg/value.hpp>

#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace rvsdg
{

enum class EventKind : std::uint8_t
{
  Load,
  Store,
  Call,
  Io
};

struct Event
{
  EventKind kind = EventKind::Load;
  std::uint64_t address = 0;
  Value value;
  std::string name;
  std::vector<Value> arguments;

  /// One line: "load 3", "store 3 i64 7", "call @input()", "io @print(i64 7)".
  [[nodiscard]] std::string
  str() const;

  bool
  operator==(const Event & other) const;
};

using Trace = std::vector<Event>;

std::string
serialize_trace(const Trace & trace);

inline constexpr std::uint64_t default_fuel = 10'000'000;
inline constexpr unsigned max_call_depth = 400;

/**
 * Addressable memory, side-effect trace and fuel shared by both evaluators.
 *
 * Allocations are bump-allocated with a one-cell gap between blocks, so addresses are never reused
 * and stepping off the end of a block traps. Cells read before being written hold zero.
 */
class Machine
{
public:
  explicit Machine(std::uint64_t fuel = default_fuel)
      : fuel_(fuel)
  {}

  void
  consume(std::uint64_t amount = 1)
  {
    if (amount > fuel_)
    {
      fuel_ = 0;
      throw Trap(TrapKind::OutOfFuel, "fuel exhausted");
    }
    fuel_ -= amount;
    steps_ += amount;
  }

  Value
  allocate(std::uint64_t count);

  Value
  load(const Type & type, const Value & address);

  void
  store(const Value & address, const Value & value);

  /// Runs a built-in external function. Unknown names trap.
  std::vector<Value>
  call_external(
      const std::string & name,
      const FunctionSignature & signature,
      std::span<const Value> arguments);

  void
  enter_call();

  void
  leave_call() noexcept
  {
    depth_--;
  }

  [[nodiscard]] const Trace &
  trace() const noexcept
  {
    return trace_;
  }

  Trace
  take_trace() noexcept
  {
    return std::move(trace_);
  }

  [[nodiscard]] std::uint64_t
  steps() const noexcept
  {
    return steps_;
  }

private:
  void
  check_address(std::uint64_t address) const;

  struct Block
  {
    std::uint64_t base;
    std::uint64_t size;
  };

  std::uint64_t fuel_;
  std::uint64_t steps_ = 0;
  unsigned depth_ = 0;
  std::uint64_t next_address_ = 1;
  std::vector<Block> blocks_;
  std::unordered_map<std::uint64_t, Value> cells_;
  Trace trace_;
};

/// Outcome of one evaluation.
struct EvalResult
{
  TrapKind trap = TrapKind::None;
  std::string trap_message;
  std::vector<Value> results;
  Trace trace;
  std::uint64_t steps = 0;

  [[nodiscard]] bool
  ok() const noexcept
  {
    return trap == TrapKind::None;
  }

  /// Results followed by the trace, one item per line.
  [[nodiscard]] std::string
  str() const;
};

/**
 * Checks that \p target refines \p source: a trapping or non-terminating source admits any
 * target behavior, otherwise results and traces must be identical. Returns a description of the
 * first difference, or nothing.
 */
std::optional<std::string>
compare_behavior(const EvalResult & source, const EvalResult & target);

}

#endif
