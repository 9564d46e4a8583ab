#ifndef RVSDG_TESTS_RW_ORACLE_HPP
#define RVSDG_TESTS_RW_ORACLE_HPP

#include <rvsdg/construction.hpp>

#include <set>

namespace rvsdg::test
{

struct RwSets
{
  VariableSet reads;
  VariableSet writes;
};

/**
 * Upward-exposed reads and definite writes of the sub-CFG \p blocks entered through \p entries,
 * computed by a liveness and a definite-assignment fixpoint. Only source variables take part.
 */
RwSets
dataflow_rw(const ir::Entity & entity, const std::set<std::size_t> & blocks, const std::set<std::size_t> & entries);

/// Blocks covered by a control tree node and the blocks control enters it through.
void
tree_blocks(const ControlTreeNode & node, std::set<std::size_t> & blocks, std::set<std::size_t> & entries);

/// Removes state and symbol pseudo variables.
VariableSet
source_variables(const VariableSet & set);

}

#endif
