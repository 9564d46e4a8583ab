#include <rvsdg/passes.hpp>

#include <algorithm>

namespace rvsdg
{

namespace
{

class Puller
{
public:
  explicit Puller(Graph & graph)
      : graph_(graph)
  {}

  std::size_t
  run(RegionId region)
  {
    for (auto node : graph_.topological_order(region))
    {
      for (auto sub : std::vector<RegionId>(graph_.subregions(node)))
        run(sub);
    }
    auto order = graph_.topological_order(region);
    for (auto it = order.rbegin(); it != order.rend(); ++it)
    {
      if (graph_.is_alive(*it))
        pull(*it);
    }
    return pulled_;
  }

private:
  /// The γ-node and alternative that hold every use of \p node, if there is exactly one.
  std::optional<std::pair<NodeId, std::size_t>>
  single_use_site(NodeId node) const
  {
    std::optional<NodeId> gamma;
    std::optional<std::size_t> alternative;
    for (auto output : graph_.outputs(node))
    {
      for (auto user : graph_.users(output))
      {
        if (graph_.is_result(user))
          return std::nullopt;
        auto consumer = graph_.consumer(user);
        if (graph_.kind(consumer) != NodeKind::Gamma || graph_.index(user) == 0)
          return std::nullopt;
        if (gamma && *gamma != consumer)
          return std::nullopt;
        gamma = consumer;
        for (std::size_t r = 0; r < graph_.subregions(consumer).size(); r++)
        {
          auto argument = graph_.argument(graph_.subregion(consumer, r), graph_.index(user) - 1);
          if (graph_.users(argument).empty())
            continue;
          if (alternative && *alternative != r)
            return std::nullopt;
          alternative = r;
        }
      }
    }
    if (!gamma || !alternative)
      return std::nullopt;
    return std::make_pair(*gamma, *alternative);
  }

  OriginId
  entry_argument(NodeId gamma, std::size_t alternative, OriginId origin)
  {
    for (std::size_t n = 0; n < graph_.num_entry_vars(gamma); n++)
    {
      if (graph_.origin(graph_.input(gamma, n + 1)) == origin)
        return graph_.argument(graph_.subregion(gamma, alternative), n);
    }
    return graph_.add_entry_var(gamma, origin).arguments[alternative];
  }

  void
  pull(NodeId node)
  {
    if (!graph_.is_simple(node) || graph_.operation(node).is_stateful())
      return;
    auto site = single_use_site(node);
    if (!site)
      return;
    auto [gamma, alternative] = *site;
    auto sub = graph_.subregion(gamma, alternative);

    std::vector<OriginId> operands;
    for (auto input : graph_.inputs(node))
      operands.push_back(entry_argument(gamma, alternative, graph_.origin(input)));
    auto copy = graph_.add_simple(sub, graph_.operation(node), operands);

    std::vector<std::size_t> dead;
    for (std::size_t n = 0; n < graph_.outputs(node).size(); n++)
    {
      for (auto user : graph_.users(graph_.output(node, n)))
      {
        auto index = graph_.index(user) - 1;
        graph_.divert_users(graph_.argument(sub, index), graph_.output(copy, n));
        dead.push_back(index);
      }
    }
    std::sort(dead.begin(), dead.end());
    dead.erase(std::unique(dead.begin(), dead.end()), dead.end());
    for (auto it = dead.rbegin(); it != dead.rend(); ++it)
      graph_.remove_entry_var(gamma, *it);
    graph_.remove_node(node);
    pulled_++;
  }

  Graph & graph_;
  std::size_t pulled_ = 0;
};

}

std::size_t
pll(Graph & graph)
{
  return Puller(graph).run(graph.root());
}

}
