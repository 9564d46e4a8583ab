#include "support.hpp"

#include <rvsdg/error.hpp>

namespace rvsdg::detail
{

OriginId
route_into(Graph & graph, OriginId origin, RegionId region)
{
  if (graph.region(origin) == region)
    return origin;
  auto owner = graph.owner(region);
  if (owner == graph.omega())
    throw GraphError("origin is not visible from the target region");
  auto outer = route_into(graph, origin, graph.parent(owner));
  switch (graph.kind(owner))
  {
  case NodeKind::Gamma:
  {
    auto ev = graph.add_entry_var(owner, outer);
    for (std::size_t n = 0; n < graph.subregions(owner).size(); n++)
    {
      if (graph.subregion(owner, n) == region)
        return ev.arguments[n];
    }
    break;
  }
  case NodeKind::Theta:
    return graph.add_loop_var(owner, outer).argument;
  case NodeKind::Lambda:
  case NodeKind::Delta:
  case NodeKind::Phi:
    return graph.add_context_var(owner, outer).argument;
  default:
    break;
  }
  throw GraphError("cannot route into region");
}

std::vector<OriginId>
inline_region(Graph & graph, RegionId source, RegionId target, SubstitutionMap & smap)
{
  graph.copy_region_nodes(source, target, smap);
  std::vector<OriginId> results;
  for (auto result : graph.results(source))
    results.push_back(Graph::lookup(smap, graph.origin(result)));
  return results;
}

namespace
{

void
collect(const Graph & graph, RegionId region, NodeKind kind, std::vector<NodeId> & found)
{
  for (auto node : graph.topological_order(region))
  {
    if (graph.kind(node) == kind)
      found.push_back(node);
    for (auto sub : graph.subregions(node))
      collect(graph, sub, kind, found);
  }
}

}

std::vector<NodeId>
collect_nodes(const Graph & graph, RegionId region, NodeKind kind)
{
  std::vector<NodeId> found;
  collect(graph, region, kind, found);
  return found;
}

bool
contains_kind(const Graph & graph, RegionId region, NodeKind kind)
{
  for (auto node : graph.nodes(region))
  {
    if (graph.kind(node) == kind)
      return true;
    for (auto sub : graph.subregions(node))
    {
      if (contains_kind(graph, sub, kind))
        return true;
    }
  }
  return false;
}

std::size_t
count_simple_nodes(const Graph & graph, RegionId region)
{
  std::size_t count = 0;
  for (auto node : graph.nodes(region))
  {
    if (graph.is_simple(node))
      count++;
    for (auto sub : graph.subregions(node))
      count += count_simple_nodes(graph, sub);
  }
  return count;
}

bool
is_invariant(const Graph & graph, const LoopVar & lv)
{
  return graph.origin(lv.result) == lv.argument;
}

}
