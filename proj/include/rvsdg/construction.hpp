#ifndef RVSDG_CONSTRUCTION_HPP
#define RVSDG_CONSTRUCTION_HPP

#include <rvsdg/graph.hpp>
#include <rvsdg/ir.hpp>

#include <set>
#include <string>
#include <vector>

namespace rvsdg
{

// Pseudo variables threaded through demand annotation next to the source variables. Symbols
// appear as "@name".
inline constexpr const char * memory_state_variable = "!mem";
inline constexpr const char * io_state_variable = "!io";

/// True for the state and symbol pseudo variables.
bool
is_pseudo_variable(const std::string & name) noexcept;

struct RestructureStats
{
  std::size_t inserted_blocks = 0;
  std::size_t predicates = 0;
  std::size_t loops = 0;
};

/**
 * Control flow restructuring. Loops become tail-controlled with a single entry and exit, and every
 * branch gets a symmetric join whose alternatives are single-entry regions. Multiple loop entries
 * and exits as well as asymmetric joins are funneled through selector variables; no block is
 * duplicated.
 *
 * The input must be phi-free. The result has a single return block.
 */
ir::Entity
restructure_control_flow(const ir::Entity & entity, RestructureStats * stats = nullptr);

enum class TreeKind : std::uint8_t
{
  Block,
  Linear,
  Branch,
  Loop
};

using VariableSet = std::set<std::string>;

struct ControlTreeNode
{
  TreeKind kind = TreeKind::Block;
  /// Block: the basic block. Branch: the block whose terminator selects. Loop: the tail block.
  std::size_t block = 0;
  /// Loop: terminator target of the tail block that repeats the loop.
  std::size_t repeat = 0;
  std::vector<ControlTreeNode> children;

  VariableSet reads;
  VariableSet writes;
  VariableSet demand;
  /// Demand set after the node, i.e. the traversal set the node was processed with.
  VariableSet demand_out;
};

/**
 * Builds the control tree of a restructured CFG. Linear nodes list their parts in control-flow
 * order, so a branch region appears as a split block, the branch node and the join block. Throws
 * InvariantError on regions that are not structured.
 */
ControlTreeNode
structural_analysis(const ir::Entity & restructured);

/**
 * Read-write and demand-set annotation. With \p thread_io, loop nodes read and write the io state so
 * that every θ-node carries it.
 */
void
annotate_demands(const ir::Entity & entity, ControlTreeNode & tree, bool thread_io = true);

/// Reads and writes of one basic block including pseudo variables.
void
block_effects(const ir::Entity & entity, std::size_t block, VariableSet & reads, VariableSet & writes);

/// Indented tree dump with the annotated sets, one node per line.
std::string
print_tree(const ir::Entity & entity, const ControlTreeNode & tree);

struct FunctionStats
{
  std::string name;
  std::size_t blocks = 0;
  std::size_t instructions = 0;
  RestructureStats restructure;
};

struct ConstructionStats
{
  std::vector<FunctionStats> functions;
};

/**
 * Builds the RVSDG of a module. Every body is brought out of SSA form, restructured, analyzed,
 * annotated and translated into a λ- or δ-region; strongly connected components of the
 * inter-procedure graph with more than one member (or a self reference) become φ-nodes.
 */
Graph
construct(const ir::Module & module, ConstructionStats * stats = nullptr);

/// Body preparation shared by construct and the tests: SSA destruction, unreachable-block removal
/// and control flow restructuring.
ir::Entity
prepare_body(const ir::Entity & entity, RestructureStats * stats = nullptr);

}

#endif
