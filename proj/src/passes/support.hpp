#ifndef RVSDG_SRC_PASSES_SUPPORT_HPP
#define RVSDG_SRC_PASSES_SUPPORT_HPP

#include <rvsdg/graph.hpp>

#include <vector>

namespace rvsdg::detail
{

/**
 * Makes \p origin available in \p region, which must be nested in the origin's region, by adding
 * context, entry or pass-through loop variables to every structural node on the way down.
 */
OriginId
route_into(Graph & graph, OriginId origin, RegionId region);

/// Copies the nodes of \p source into \p target and returns the translated result origins.
/// \p smap must map the arguments of \p source.
std::vector<OriginId>
inline_region(Graph & graph, RegionId source, RegionId target, SubstitutionMap & smap);

/// Structural nodes of \p kind anywhere below \p region, parents before children.
std::vector<NodeId>
collect_nodes(const Graph & graph, RegionId region, NodeKind kind);

bool
contains_kind(const Graph & graph, RegionId region, NodeKind kind);

/// Number of simple nodes in \p region and all nested regions.
std::size_t
count_simple_nodes(const Graph & graph, RegionId region);

/// True if the loop variable's result passes its argument through unchanged.
bool
is_invariant(const Graph & graph, const LoopVar & lv);

}

#endif
