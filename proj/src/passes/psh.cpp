#include "support.hpp"

#include <rvsdg/passes.hpp>

namespace rvsdg
{

namespace
{

class Hoister
{
public:
  explicit Hoister(Graph & graph)
      : graph_(graph)
  {}

  std::size_t
  run(RegionId region)
  {
    for (auto node : graph_.topological_order(region))
    {
      for (auto sub : std::vector<RegionId>(graph_.subregions(node)))
        run(sub);
      if (graph_.kind(node) == NodeKind::Theta)
        hoist_theta(node);
      else if (graph_.kind(node) == NodeKind::Gamma)
        hoist_gamma(node);
    }
    return hoisted_;
  }

private:
  using OuterMap = std::unordered_map<OriginId, OriginId>;

  /// Outer origins for the operands of \p node, or nothing if an operand varies inside the region.
  std::optional<std::vector<OriginId>>
  outer_operands(NodeId node, const OuterMap & outer, RegionId target)
  {
    std::vector<OriginId> operands;
    for (auto input : graph_.inputs(node))
    {
      auto origin = graph_.origin(input);
      if (auto it = outer.find(origin); it != outer.end())
      {
        operands.push_back(it->second);
        continue;
      }
      if (graph_.is_argument(origin))
        return std::nullopt;
      auto producer = graph_.producer(origin);
      if (!graph_.is_simple(producer) || !graph_.operation(producer).is_nullary())
        return std::nullopt;
      operands.push_back(graph_.output(graph_.add_simple(target, graph_.operation(producer), {}), 0));
    }
    return operands;
  }

  bool
  candidate(NodeId node, bool allow_trap) const
  {
    if (!graph_.is_simple(node))
      return false;
    const auto & op = graph_.operation(node);
    return !op.is_stateful() && !op.is_nullary() && (allow_trap || !op.may_trap());
  }

  bool
  operands_invariant(NodeId node, const OuterMap & outer) const
  {
    for (auto input : graph_.inputs(node))
    {
      auto origin = graph_.origin(input);
      if (outer.count(origin))
        continue;
      if (graph_.is_argument(origin))
        return false;
      auto producer = graph_.producer(origin);
      if (!graph_.is_simple(producer) || !graph_.operation(producer).is_nullary())
        return false;
    }
    return true;
  }

  /// The loop body executes at least once, so operations that may trap can leave a θ-node.
  void
  hoist_theta(NodeId theta)
  {
    auto body = graph_.subregion(theta);
    auto target = graph_.parent(theta);
    OuterMap outer;
    for (std::size_t n = 0; n < graph_.num_loop_vars(theta); n++)
    {
      auto lv = graph_.loop_var(theta, n);
      if (detail::is_invariant(graph_, lv))
        outer[lv.argument] = graph_.origin(lv.input);
    }
    for (auto node : graph_.topological_order(body))
    {
      if (!candidate(node, true) || !operands_invariant(node, outer))
        continue;
      auto operands = *outer_operands(node, outer, target);
      auto copy = graph_.add_simple(target, graph_.operation(node), operands);
      for (std::size_t n = 0; n < graph_.outputs(node).size(); n++)
      {
        auto lv = graph_.add_loop_var(theta, graph_.output(copy, n));
        graph_.divert_users(graph_.output(node, n), lv.argument);
        outer[lv.argument] = graph_.output(copy, n);
      }
      graph_.remove_node(node);
      hoisted_++;
    }
  }

  /// Alternatives may not execute, so only operations that never trap leave a γ-node.
  void
  hoist_gamma(NodeId gamma)
  {
    auto target = graph_.parent(gamma);
    for (std::size_t r = 0; r < graph_.subregions(gamma).size(); r++)
    {
      auto sub = graph_.subregion(gamma, r);
      OuterMap outer;
      for (std::size_t n = 0; n < graph_.num_entry_vars(gamma); n++)
        outer[graph_.argument(sub, n)] = graph_.origin(graph_.input(gamma, n + 1));
      for (auto node : graph_.topological_order(sub))
      {
        if (!candidate(node, false) || !operands_invariant(node, outer))
          continue;
        auto operands = *outer_operands(node, outer, target);
        auto copy = graph_.add_simple(target, graph_.operation(node), operands);
        for (std::size_t n = 0; n < graph_.outputs(node).size(); n++)
        {
          auto ev = graph_.add_entry_var(gamma, graph_.output(copy, n));
          graph_.divert_users(graph_.output(node, n), ev.arguments[r]);
          outer[ev.arguments[r]] = graph_.output(copy, n);
        }
        graph_.remove_node(node);
        hoisted_++;
      }
    }
  }

  Graph & graph_;
  std::size_t hoisted_ = 0;
};

}

std::size_t
psh(Graph & graph)
{
  return Hoister(graph).run(graph.root());
}

}
