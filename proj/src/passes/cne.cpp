#include <rvsdg/passes.hpp>

#include <algorithm>
#include <map>

namespace rvsdg
{

namespace
{

/**
 * Congruence classes of origins, each named by one of its members. Simple nodes are congruent when
 * they carry the same stateless operation on congruent operands. γ entry variables, context
 * variables and exit variables are congruent when their origins are. θ loop variables are
 * congruent when both their inputs and their results are, which is found by refining an
 * optimistic partition until it is stable.
 */
class Congruence
{
public:
  explicit Congruence(const Graph & graph)
      : graph_(graph)
  {}

  OriginId
  find(OriginId origin) const
  {
    auto it = classes_.find(origin);
    return it == classes_.end() ? origin : it->second;
  }

  void
  mark_region(RegionId region)
  {
    std::map<std::pair<std::string, std::vector<std::uint32_t>>, NodeId> table;
    for (auto node : graph_.topological_order(region))
    {
      switch (graph_.kind(node))
      {
      case NodeKind::Simple:
        mark_simple(node, table);
        break;
      case NodeKind::Gamma:
        mark_gamma(node);
        break;
      case NodeKind::Theta:
        mark_theta(node);
        break;
      case NodeKind::Lambda:
      case NodeKind::Delta:
      case NodeKind::Phi:
        group_by_input(node, graph_.subregion(node), graph_.num_context_vars(node), 0);
        mark_region(graph_.subregion(node));
        reset_outputs(node);
        break;
      case NodeKind::Omega:
        break;
      }
    }
  }

  /// Classes with more than one member, each member list starting with the class name.
  std::vector<std::vector<OriginId>>
  classes() const
  {
    std::map<OriginId, std::vector<OriginId>> members;
    for (const auto & [origin, name] : classes_)
    {
      if (origin != name)
        members[name].push_back(origin);
    }
    std::vector<std::vector<OriginId>> result;
    for (auto & [name, others] : members)
    {
      std::vector<OriginId> all{ name };
      all.insert(all.end(), others.begin(), others.end());
      result.push_back(std::move(all));
    }
    return result;
  }

private:
  using Table = std::map<std::pair<std::string, std::vector<std::uint32_t>>, NodeId>;

  void
  reset_outputs(NodeId node)
  {
    for (auto output : graph_.outputs(node))
      classes_[output] = output;
  }

  void
  mark_simple(NodeId node, Table & table)
  {
    reset_outputs(node);
    const auto & op = graph_.operation(node);
    if (op.is_stateful())
      return;
    std::vector<std::uint32_t> operands;
    for (auto input : graph_.inputs(node))
      operands.push_back(find(graph_.origin(input)).index);
    if (op.is_commutative())
      std::sort(operands.begin(), operands.end());
    auto [it, inserted] = table.emplace(std::make_pair(op.str(), std::move(operands)), node);
    if (inserted)
      return;
    for (std::size_t n = 0; n < graph_.outputs(node).size(); n++)
      classes_[graph_.output(node, n)] = find(graph_.output(it->second, n));
  }

  /// Arguments first + n of \p region for inputs first_input + n, n < count, grouped by the class
  /// of the input origin. State arguments stay singletons.
  void
  group_by_input(NodeId node, RegionId region, std::size_t count, std::size_t first_input)
  {
    std::map<OriginId, OriginId> seen;
    for (std::size_t n = 0; n < graph_.arguments(region).size(); n++)
    {
      auto argument = graph_.argument(region, n);
      classes_[argument] = argument;
      if (n >= count || graph_.type(argument).is_state())
        continue;
      auto key = find(graph_.origin(graph_.input(node, first_input + n)));
      auto [it, inserted] = seen.emplace(key, argument);
      if (!inserted)
        classes_[argument] = it->second;
    }
  }

  void
  mark_gamma(NodeId gamma)
  {
    for (auto sub : graph_.subregions(gamma))
    {
      group_by_input(gamma, sub, graph_.num_entry_vars(gamma), 1);
      mark_region(sub);
    }
    reset_outputs(gamma);
    std::map<std::vector<OriginId>, OriginId> seen;
    for (std::size_t n = 0; n < graph_.num_exit_vars(gamma); n++)
    {
      auto output = graph_.output(gamma, n);
      if (graph_.type(output).is_state())
        continue;
      std::vector<OriginId> key;
      for (auto sub : graph_.subregions(gamma))
        key.push_back(find(graph_.origin(graph_.result(sub, n))));
      auto [it, inserted] = seen.emplace(std::move(key), output);
      if (!inserted)
        classes_[output] = it->second;
    }
  }

  void
  mark_theta(NodeId theta)
  {
    auto body = graph_.subregion(theta);
    auto count = graph_.num_loop_vars(theta);
    // partition[n] is the lowest loop variable in n's group; state variables stay alone
    std::vector<std::size_t> partition(count);
    std::map<OriginId, std::size_t> first;
    for (std::size_t n = 0; n < count; n++)
    {
      partition[n] = n;
      if (graph_.type(graph_.output(theta, n)).is_state())
        continue;
      auto [it, inserted] = first.emplace(find(graph_.origin(graph_.input(theta, n))), n);
      partition[n] = it->second;
    }

    while (true)
    {
      for (std::size_t n = 0; n < count; n++)
        classes_[graph_.argument(body, n)] = graph_.argument(body, partition[n]);
      mark_region(body);

      std::map<std::pair<std::size_t, OriginId>, std::size_t> split;
      std::vector<std::size_t> refined(count);
      for (std::size_t n = 0; n < count; n++)
      {
        auto key = std::make_pair(partition[n], find(graph_.origin(graph_.result(body, n + 1))));
        auto [it, inserted] = split.emplace(key, n);
        refined[n] = it->second;
      }
      if (refined == partition)
        break;
      partition = std::move(refined);
    }

    for (std::size_t n = 0; n < count; n++)
      classes_[graph_.output(theta, n)] = graph_.output(theta, partition[n]);
  }

  const Graph & graph_;
  std::unordered_map<OriginId, OriginId> classes_;
};

/// Ordering that prefers the lowest producer id, then the lowest port index.
std::pair<std::uint32_t, std::size_t>
rank(const Graph & graph, OriginId origin)
{
  if (graph.is_argument(origin))
    return { 0, graph.index(origin) };
  return { graph.producer(origin).index, graph.index(origin) };
}

}

std::size_t
cne(Graph & graph)
{
  Congruence congruence(graph);
  congruence.mark_region(graph.root());

  std::size_t diverted = 0;
  for (const auto & members : congruence.classes())
  {
    auto representative = *std::min_element(
        members.begin(),
        members.end(),
        [&](OriginId a, OriginId b)
        {
          return rank(graph, a) < rank(graph, b);
        });
    for (auto origin : members)
    {
      if (origin != representative && !graph.users(origin).empty())
      {
        graph.divert_users(origin, representative);
        diverted++;
      }
    }
  }
  return diverted;
}

}
