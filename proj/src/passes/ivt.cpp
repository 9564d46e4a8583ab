#include "support.hpp"

#include <rvsdg/passes.hpp>

namespace rvsdg
{

namespace
{

bool
same_predicate(const Graph & graph, OriginId a, OriginId b)
{
  if (a == b)
    return true;
  if (graph.is_argument(a) || graph.is_argument(b))
    return false;
  auto na = graph.producer(a);
  auto nb = graph.producer(b);
  if (!graph.is_simple(na) || !graph.is_simple(nb) || graph.operation(na).code() != OpCode::Match)
    return false;
  return graph.operation(na) == graph.operation(nb)
      && graph.origin(graph.input(na, 0)) == graph.origin(graph.input(nb, 0));
}

/**
 * A θ-node whose body is a two-way γ-node on the loop predicate plus stateless nodes that do not
 * depend on the γ-node. One iteration evaluates the glue, then alternative 1 if the loop repeats
 * and alternative 0 on the last iteration. The inverted form tests the predicate once up front and
 * runs a loop of alternative-1 iterations followed by one alternative-0 iteration.
 */
class Inverter
{
public:
  Inverter(Graph & graph, NodeId theta)
      : graph_(graph),
        theta_(theta),
        body_(graph.subregion(theta))
  {}

  bool
  match()
  {
    for (auto node : graph_.topological_order(body_))
    {
      if (graph_.kind(node) == NodeKind::Gamma && !gamma_.valid())
      {
        gamma_ = node;
        continue;
      }
      if (!graph_.is_simple(node) || graph_.operation(node).is_stateful())
        return false;
      glue_.push_back(node);
    }
    if (!gamma_.valid() || graph_.subregions(gamma_).size() != 2)
      return false;
    for (auto node : glue_)
    {
      for (auto input : graph_.inputs(node))
      {
        auto origin = graph_.origin(input);
        if (!graph_.is_argument(origin) && graph_.producer(origin) == gamma_)
          return false;
      }
    }
    predicate_ = graph_.origin(graph_.input(gamma_, 0));
    return same_predicate(graph_, predicate_, graph_.origin(graph_.result(body_, 0)));
  }

  void
  invert()
  {
    auto region = graph_.parent(theta_);
    std::vector<OriginId> initial;
    for (auto input : graph_.inputs(theta_))
      initial.push_back(graph_.origin(input));

    auto outer = graph_.add_gamma(region, predicate(region, initial));
    for (auto v : initial)
      graph_.add_entry_var(outer, v);
    auto stop = graph_.subregion(outer, 0);
    auto last = iterate(stop, std::vector<OriginId>(graph_.arguments(stop)), 0);

    auto loop_region = graph_.subregion(outer, 1);
    auto loop = graph_.add_theta(loop_region);
    std::vector<OriginId> entering(graph_.arguments(loop_region));
    for (auto argument : entering)
      graph_.add_loop_var(loop, argument);
    auto loop_body = graph_.subregion(loop);
    auto next = iterate(loop_body, std::vector<OriginId>(graph_.arguments(loop_body)), 1);
    for (std::size_t n = 0; n < next.size(); n++)
      graph_.set_origin(graph_.result(loop_body, n + 1), next[n]);
    graph_.set_predicate(loop, predicate(loop_body, next));
    auto after = iterate(loop_region, std::vector<OriginId>(graph_.outputs(loop)), 0);

    for (std::size_t n = 0; n < last.size(); n++)
    {
      OriginId origins[] = { last[n], after[n] };
      graph_.divert_users(graph_.output(theta_, n), graph_.add_exit_var(outer, origins).output);
    }
    graph_.remove_node(theta_);
  }

private:
  void
  copy_glue(RegionId region, const std::vector<OriginId> & values, SubstitutionMap & smap)
  {
    for (std::size_t n = 0; n < values.size(); n++)
      smap[graph_.argument(body_, n)] = values[n];
    for (auto node : glue_)
      graph_.copy_node(node, region, smap);
  }

  OriginId
  predicate(RegionId region, const std::vector<OriginId> & values)
  {
    SubstitutionMap smap;
    copy_glue(region, values, smap);
    return Graph::lookup(smap, predicate_);
  }

  /// One iteration taking alternative \p alternative of the γ-node; returns the loop values after it.
  std::vector<OriginId>
  iterate(RegionId region, const std::vector<OriginId> & values, std::size_t alternative)
  {
    SubstitutionMap smap;
    copy_glue(region, values, smap);
    auto sub = graph_.subregion(gamma_, alternative);
    SubstitutionMap inner;
    for (std::size_t n = 0; n < graph_.num_entry_vars(gamma_); n++)
      inner[graph_.argument(sub, n)] = Graph::lookup(smap, graph_.origin(graph_.input(gamma_, n + 1)));
    auto results = detail::inline_region(graph_, sub, region, inner);
    for (std::size_t n = 0; n < results.size(); n++)
      smap[graph_.output(gamma_, n)] = results[n];
    std::vector<OriginId> next;
    for (std::size_t n = 1; n < graph_.results(body_).size(); n++)
      next.push_back(Graph::lookup(smap, graph_.origin(graph_.result(body_, n))));
    return next;
  }

  Graph & graph_;
  NodeId theta_;
  RegionId body_;
  NodeId gamma_;
  std::vector<NodeId> glue_;
  OriginId predicate_;
};

}

std::size_t
ivt(Graph & graph)
{
  std::size_t inverted = 0;
  for (auto theta : detail::collect_nodes(graph, graph.root(), NodeKind::Theta))
  {
    if (!graph.is_alive(theta))
      continue;
    Inverter inverter(graph, theta);
    if (!inverter.match())
      continue;
    inverter.invert();
    inverted++;
  }
  return inverted;
}

}
