#include "support.hpp"

#include <rvsdg/passes.hpp>

namespace rvsdg
{

namespace
{

/**
 * The io state is never redirected around a θ-node, so every loop stays ordered with the io
 * effects around it and is never removed as dead.
 */
std::size_t
redirect_theta(Graph & graph, NodeId theta)
{
  std::size_t changes = 0;
  for (std::size_t n = 0; n < graph.num_loop_vars(theta); n++)
  {
    auto lv = graph.loop_var(theta, n);
    if (graph.type(lv.output).kind() == TypeKind::IoState || !detail::is_invariant(graph, lv))
      continue;
    if (graph.divert_users(lv.output, graph.origin(lv.input)))
      changes++;
  }
  return changes;
}

std::size_t
redirect_gamma(Graph & graph, NodeId gamma)
{
  std::size_t changes = 0;
  for (std::size_t n = 0; n < graph.num_exit_vars(gamma); n++)
  {
    auto ex = graph.exit_var(gamma, n);
    std::optional<std::size_t> entry;
    bool invariant = true;
    for (std::size_t r = 0; r < ex.results.size() && invariant; r++)
    {
      auto origin = graph.origin(ex.results[r]);
      if (!graph.is_argument(origin))
      {
        invariant = false;
        break;
      }
      auto index = graph.index(origin);
      if (entry && *entry != index)
        invariant = false;
      entry = index;
    }
    if (!invariant || !entry)
      continue;
    if (graph.divert_users(ex.output, graph.origin(graph.input(gamma, *entry + 1))))
      changes++;
  }
  return changes;
}

std::size_t
redirect_region(Graph & graph, RegionId region)
{
  std::size_t changes = 0;
  for (auto node : graph.topological_order(region))
  {
    for (auto sub : std::vector<RegionId>(graph.subregions(node)))
      changes += redirect_region(graph, sub);
    if (graph.kind(node) == NodeKind::Theta)
      changes += redirect_theta(graph, node);
    else if (graph.kind(node) == NodeKind::Gamma)
      changes += redirect_gamma(graph, node);
  }
  return changes;
}

}

std::size_t
inv(Graph & graph)
{
  std::size_t total = 0;
  while (auto changes = redirect_region(graph, graph.root()))
    total += changes;
  return total;
}

}
