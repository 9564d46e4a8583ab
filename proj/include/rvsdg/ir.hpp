#ifndef RVSDG_IR_HPP
#define RVSDG_IR_HPP

#include <rvsdg/operation.hpp>
#include <rvsdg/type.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rvsdg::ir
{

struct Operand
{
  enum class Kind : std::uint8_t
  {
    Variable,
    Literal,
    Symbol
  };

  Kind kind = Kind::Literal;
  Type type;
  /// Variable or symbol name, without sigil.
  std::string name;
  /// Literal bits: masked integer, pointer or float bit pattern.
  std::uint64_t bits = 0;

  static Operand
  variable(std::string name, Type type);

  static Operand
  literal(Type type, std::uint64_t bits);

  static Operand
  float_literal(double value);

  static Operand
  symbol(std::string name, Type type);

  [[nodiscard]] bool
  is_variable() const noexcept
  {
    return kind == Kind::Variable;
  }

  bool
  operator==(const Operand &) const = default;
};

enum class InstKind : std::uint8_t
{
  /// Arithmetic, comparison, conversion, match, undef, alloca, load, store or gep.
  Op,
  Copy,
  Call,
  Phi
};

struct Instruction
{
  InstKind kind = InstKind::Op;
  /// Defined variable; empty for stores and void calls.
  std::string result;
  /// Type of the defined variable (or the stored value for stores).
  Type type;
  std::optional<Operation> op;
  /// Call: callee followed by the arguments. Phi: one operand per incoming block.
  std::vector<Operand> operands;
  /// Phi incoming blocks, parallel to operands.
  std::vector<std::size_t> incoming;

  [[nodiscard]] bool
  has_result() const noexcept
  {
    return !result.empty();
  }

  /// Reads or writes memory, or calls a function.
  [[nodiscard]] bool
  is_stateful() const noexcept
  {
    return kind == InstKind::Call || (op && op->is_stateful());
  }

  bool
  operator==(const Instruction & other) const;
};

struct Terminator
{
  enum class Kind : std::uint8_t
  {
    Jump,
    Branch,
    Return
  };

  Kind kind = Kind::Return;
  /// Branch selector or returned value.
  std::optional<Operand> value;
  std::vector<std::size_t> targets;

  bool
  operator==(const Terminator &) const = default;
};

struct BasicBlock
{
  std::string label;
  std::vector<Instruction> instructions;
  Terminator terminator;

  bool
  operator==(const BasicBlock &) const = default;
};

/// A function or a global variable. Block 0 of a body is its entry.
struct Entity
{
  enum class Kind : std::uint8_t
  {
    Function,
    Global
  };

  Kind kind = Kind::Function;
  std::string name;
  /// Function type for functions, value type for globals.
  Type type;
  bool exported = true;
  bool external = false;
  std::vector<std::string> parameters;
  std::vector<BasicBlock> blocks;

  [[nodiscard]] bool
  is_function() const noexcept
  {
    return kind == Kind::Function;
  }

  /// Value type of a function's result, if it returns one.
  [[nodiscard]] std::optional<Type>
  return_type() const;

  bool
  operator==(const Entity &) const = default;
};

struct Module
{
  std::vector<Entity> entities;

  [[nodiscard]] const Entity *
  find(std::string_view name) const;

  [[nodiscard]] Entity *
  find(std::string_view name);

  [[nodiscard]] std::optional<std::size_t>
  index_of(std::string_view name) const;

  bool
  operator==(const Module &) const = default;
};

/// Parses and validates (in non-SSA mode) module text. Throws ParseError.
Module
parse(std::string_view text);

/// Canonical text; parse(print(m)) == m.
std::string
print(const Module & module);

std::string
print(const Entity & entity);

std::string
print_type(const std::optional<Type> & type);

struct Ipg
{
  /// Entity indices, in module order.
  std::vector<std::size_t> nodes;
  /// (referencing, referenced) pairs in ascending order.
  std::vector<std::pair<std::size_t, std::size_t>> edges;

  [[nodiscard]] std::vector<std::size_t>
  successors(std::size_t node) const;
};

Ipg
compute_ipg(const Module & module);

/**
 * Strongly connected components of the IPG in reverse topological order: every component precedes
 * the components that reference it.
 */
std::vector<std::vector<std::size_t>>
ipg_components(const Ipg & ipg);

enum class CfgMode : std::uint8_t
{
  Ssa,
  NonSsa
};

std::vector<std::string>
validate_cfg(const Module & module, const Entity & entity, CfgMode mode);

std::vector<std::string>
validate_module(const Module & module, CfgMode mode);

/// True if every variable has at most one definition (parameters included).
bool
is_single_assignment(const Entity & entity);

// CFG utilities shared by construction and destruction

std::vector<std::size_t>
successors(const BasicBlock & block);

std::vector<std::vector<std::size_t>>
predecessors(const Entity & entity);

/// Variables read by an instruction or terminator, in operand order.
std::vector<std::string>
reads(const Instruction & inst);

std::vector<std::string>
reads(const Terminator & term);

/// Types of all variables of a body, including parameters.
std::vector<std::pair<std::string, Type>>
variable_types(const Entity & entity);

/// Immediate dominators (entry maps to itself; unreachable blocks to none).
std::vector<std::optional<std::size_t>>
immediate_dominators(const Entity & entity);

/// Replaces phis by copies through fresh temporaries in the predecessors.
void
destruct_ssa(Entity & entity);

/// Places phis on the dominance frontiers and renames every variable to a single definition.
/// Existing phis are lowered to copies first.
void
construct_ssa(Entity & entity);

/// Removes blocks unreachable from the entry.
void
remove_unreachable_blocks(Entity & entity);

/// Number of instructions plus terminators over all bodies.
std::size_t
instruction_count(const Module & module);

}

#endif
