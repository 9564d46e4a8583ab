#include "support.hpp"

#include <rvsdg/passes.hpp>

namespace rvsdg
{

namespace
{

class Unroller
{
public:
  Unroller(Graph & graph, NodeId theta)
      : graph_(graph),
        body_(graph.subregion(theta)),
        nodes_(graph.topological_order(body_))
  {}

  /**
   * Appends \p copies guarded replicas of the original body to \p region. \p values are the loop
   * values after the preceding iteration and \p predicate its continuation predicate; returns the
   * values and predicate after the last replica.
   */
  std::pair<std::vector<OriginId>, OriginId>
  replicate(RegionId region, std::vector<OriginId> values, OriginId predicate, unsigned copies)
  {
    if (copies == 0)
      return { std::move(values), predicate };

    auto gamma = graph_.add_gamma(region, predicate);
    for (auto v : values)
      graph_.add_entry_var(gamma, v);
    graph_.add_entry_var(gamma, predicate);

    // alternative 0 leaves the loop and passes everything through, including the zero predicate
    auto stop = graph_.subregion(gamma, 0);
    auto go = graph_.subregion(gamma, 1);
    SubstitutionMap smap;
    for (std::size_t n = 0; n < values.size(); n++)
      smap[graph_.argument(body_, n)] = graph_.argument(go, n);
    for (auto node : nodes_)
      graph_.copy_node(node, go, smap);
    std::vector<OriginId> next;
    for (std::size_t n = 0; n < values.size(); n++)
      next.push_back(Graph::lookup(smap, graph_.origin(graph_.result(body_, n + 1))));
    auto [inner, inner_predicate] =
        replicate(go, std::move(next), Graph::lookup(smap, graph_.origin(graph_.result(body_, 0))), copies - 1);

    std::vector<OriginId> outputs;
    for (std::size_t n = 0; n <= values.size(); n++)
    {
      auto go_origin = n < values.size() ? inner[n] : inner_predicate;
      OriginId origins[] = { graph_.argument(stop, n), go_origin };
      outputs.push_back(graph_.add_exit_var(gamma, origins).output);
    }
    auto last = outputs.back();
    outputs.pop_back();
    return { std::move(outputs), last };
  }

  void
  run(unsigned factor)
  {
    std::vector<OriginId> values;
    for (std::size_t n = 1; n < graph_.results(body_).size(); n++)
      values.push_back(graph_.origin(graph_.result(body_, n)));
    auto predicate = graph_.origin(graph_.result(body_, 0));
    auto [final_values, final_predicate] = replicate(body_, std::move(values), predicate, factor - 1);
    for (std::size_t n = 0; n < final_values.size(); n++)
      graph_.set_origin(graph_.result(body_, n + 1), final_values[n]);
    graph_.set_origin(graph_.result(body_, 0), final_predicate);
  }

private:
  Graph & graph_;
  RegionId body_;
  std::vector<NodeId> nodes_;
};

}

std::size_t
url(Graph & graph, unsigned factor)
{
  if (factor <= 1)
    return 0;
  std::size_t unrolled = 0;
  for (auto theta : detail::collect_nodes(graph, graph.root(), NodeKind::Theta))
  {
    if (detail::contains_kind(graph, graph.subregion(theta), NodeKind::Theta))
      continue;
    Unroller(graph, theta).run(factor);
    unrolled++;
  }
  return unrolled;
}

}
