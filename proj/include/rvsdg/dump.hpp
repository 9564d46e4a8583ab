#ifndef RVSDG_DUMP_HPP
#define RVSDG_DUMP_HPP

#include <rvsdg/graph.hpp>
#include <rvsdg/ir.hpp>

#include <map>
#include <string>

namespace rvsdg
{

/**
 * Line-oriented textual dump. Nodes and regions are renumbered in traversal order (regions
 * depth-first, nodes in topological order), so graphs that differ only in handle values print
 * identically.
 */
std::string
dump(const Graph & graph);

/// Graphviz rendering with one cluster per region and node labels "n<id>:<opname>".
std::string
to_dot(const Graph & graph);

/// Graphviz rendering of the CFGs of a module, one cluster per defined entity.
std::string
cfg_to_dot(const ir::Module & module);

/**
 * Graphviz rendering of the annotated control trees of a module. Bodies are restructured first, so
 * block labels refer to the restructured CFGs.
 */
std::string
tree_to_dot(const ir::Module & module);

/**
 * Size metrics: "nodes", "nodes.<kind>" per node kind, "ops.<name>" per simple operation,
 * "regions" and "depth" (maximal region nesting).
 */
std::map<std::string, std::size_t>
graph_stats(const Graph & graph);

}

#endif
