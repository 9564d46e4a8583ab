#include "support.hpp"

#include <rvsdg/passes.hpp>

#include <map>

namespace rvsdg
{

namespace
{

/// The λ-node a function origin refers to, following variables that pass it through unchanged.
/// λ-nodes inside φ-regions are only reachable through recursion variables and never resolve.
std::optional<NodeId>
resolve_callee(const Graph & graph, OriginId origin)
{
  while (graph.is_argument(origin))
  {
    auto owner = graph.owner(graph.region(origin));
    auto n = graph.index(origin);
    switch (graph.kind(owner))
    {
    case NodeKind::Lambda:
    case NodeKind::Delta:
    case NodeKind::Phi:
      if (n >= graph.num_context_vars(owner))
        return std::nullopt;
      origin = graph.origin(graph.input(owner, n));
      break;
    case NodeKind::Gamma:
      origin = graph.origin(graph.input(owner, n + 1));
      break;
    case NodeKind::Theta:
    {
      auto lv = graph.loop_var(owner, n);
      if (!detail::is_invariant(graph, lv))
        return std::nullopt;
      origin = graph.origin(lv.input);
      break;
    }
    default:
      return std::nullopt;
    }
  }
  auto producer = graph.producer(origin);
  if (graph.kind(producer) != NodeKind::Lambda || graph.parent(producer) != graph.root())
    return std::nullopt;
  return producer;
}

void
inline_call(Graph & graph, NodeId apply, NodeId lambda)
{
  auto region = graph.parent(apply);
  auto body = graph.subregion(lambda);
  SubstitutionMap smap;
  auto cvs = graph.num_context_vars(lambda);
  for (std::size_t n = 0; n < cvs; n++)
    smap[graph.argument(body, n)] = detail::route_into(graph, graph.origin(graph.input(lambda, n)), region);
  // apply inputs: callee, parameters, memory, io; λ arguments: context, parameters, memory, io
  for (std::size_t n = 1; n < graph.inputs(apply).size(); n++)
    smap[graph.argument(body, cvs + n - 1)] = graph.origin(graph.input(apply, n));
  auto results = detail::inline_region(graph, body, region, smap);
  for (std::size_t n = 0; n < results.size(); n++)
    graph.divert_users(graph.output(apply, n), results[n]);
  graph.remove_node(apply);
}

}

std::size_t
iln(Graph & graph)
{
  std::vector<std::pair<NodeId, NodeId>> calls;
  std::map<NodeId, std::size_t> call_count;
  graph.walk(
      graph.root(),
      [&](NodeId node)
      {
        if (!graph.is_simple(node) || graph.operation(node).code() != OpCode::Apply)
          return;
        if (auto callee = resolve_callee(graph, graph.origin(graph.input(node, 0))))
        {
          calls.emplace_back(node, *callee);
          call_count[*callee]++;
        }
      });

  std::size_t inlined = 0;
  for (auto [apply, lambda] : calls)
  {
    if (call_count[lambda] > 1 && detail::count_simple_nodes(graph, graph.subregion(lambda)) > inline_size_limit)
      continue;
    inline_call(graph, apply, lambda);
    inlined++;
  }
  return inlined;
}

}
