#include <rvsdg/passes.hpp>

namespace rvsdg
{

namespace
{

class Marker
{
public:
  explicit Marker(const Graph & graph)
      : graph_(graph)
  {}

  std::unordered_set<OriginId>
  run()
  {
    for (auto result : graph_.results(graph_.root()))
      mark(graph_.origin(result));
    while (!pending_.empty())
    {
      auto origin = pending_.back();
      pending_.pop_back();
      if (graph_.is_argument(origin))
        visit_argument(origin);
      else
        visit_output(origin);
    }
    return std::move(alive_);
  }

private:
  void
  mark(OriginId origin)
  {
    if (alive_.insert(origin).second)
      pending_.push_back(origin);
  }

  void
  mark_user(UserId user)
  {
    mark(graph_.origin(user));
  }

  void
  visit_argument(OriginId argument)
  {
    auto region = graph_.region(argument);
    auto node = graph_.owner(region);
    auto n = graph_.index(argument);
    switch (graph_.kind(node))
    {
    case NodeKind::Gamma:
      mark_user(graph_.input(node, n + 1));
      break;
    case NodeKind::Theta:
      mark_user(graph_.input(node, n));
      mark(graph_.output(node, n));
      break;
    case NodeKind::Lambda:
    case NodeKind::Delta:
      if (n < graph_.num_context_vars(node))
        mark_user(graph_.input(node, n));
      break;
    case NodeKind::Phi:
      if (n < graph_.num_context_vars(node))
        mark_user(graph_.input(node, n));
      else
        mark(graph_.output(node, n - graph_.num_context_vars(node)));
      break;
    case NodeKind::Simple:
    case NodeKind::Omega:
      break;
    }
  }

  void
  visit_output(OriginId output)
  {
    auto node = graph_.producer(output);
    auto n = graph_.index(output);
    switch (graph_.kind(node))
    {
    case NodeKind::Simple:
      for (auto input : graph_.inputs(node))
        mark_user(input);
      break;
    case NodeKind::Gamma:
      mark_user(graph_.input(node, 0));
      for (auto sub : graph_.subregions(node))
        mark_user(graph_.result(sub, n));
      break;
    case NodeKind::Theta:
    {
      auto body = graph_.subregion(node);
      mark_user(graph_.result(body, 0));
      mark_user(graph_.result(body, n + 1));
      mark_user(graph_.input(node, n));
      break;
    }
    case NodeKind::Lambda:
      for (auto result : graph_.results(graph_.subregion(node)))
        mark_user(result);
      break;
    case NodeKind::Delta:
    case NodeKind::Phi:
      mark_user(graph_.result(graph_.subregion(node), n));
      break;
    case NodeKind::Omega:
      break;
    }
  }

  const Graph & graph_;
  std::unordered_set<OriginId> alive_;
  std::vector<OriginId> pending_;
};

class Sweeper
{
public:
  Sweeper(Graph & graph, std::unordered_set<OriginId> alive)
      : graph_(graph),
        alive_(std::move(alive))
  {}

  std::size_t
  run()
  {
    auto root = graph_.root();
    sweep_region(root);
    for (std::size_t n = graph_.arguments(root).size(); n-- > 0;)
    {
      if (!alive(graph_.argument(root, n)))
      {
        graph_.remove_import(n);
        removed_++;
      }
    }
    return removed_;
  }

private:
  bool
  alive(OriginId origin) const
  {
    return alive_.count(origin) != 0;
  }

  bool
  any_output_alive(NodeId node) const
  {
    for (auto output : graph_.outputs(node))
    {
      if (alive(output))
        return true;
    }
    return false;
  }

  void
  sweep_region(RegionId region)
  {
    auto order = graph_.topological_order(region);
    for (auto it = order.rbegin(); it != order.rend(); ++it)
    {
      auto node = *it;
      if (!any_output_alive(node))
      {
        graph_.remove_node(node);
        removed_++;
        continue;
      }
      switch (graph_.kind(node))
      {
      case NodeKind::Gamma:
        sweep_gamma(node);
        break;
      case NodeKind::Theta:
        sweep_theta(node);
        break;
      case NodeKind::Lambda:
      case NodeKind::Delta:
        sweep_region(graph_.subregion(node));
        sweep_context_vars(node);
        break;
      case NodeKind::Phi:
        sweep_phi(node);
        break;
      default:
        break;
      }
    }
  }

  void
  sweep_gamma(NodeId gamma)
  {
    for (std::size_t n = graph_.num_exit_vars(gamma); n-- > 0;)
    {
      if (!alive(graph_.output(gamma, n)))
      {
        graph_.remove_exit_var(gamma, n);
        removed_++;
      }
    }
    for (auto sub : graph_.subregions(gamma))
      sweep_region(sub);
    for (std::size_t n = graph_.num_entry_vars(gamma); n-- > 0;)
    {
      bool used = false;
      for (auto sub : graph_.subregions(gamma))
        used = used || alive(graph_.argument(sub, n));
      if (!used)
      {
        graph_.remove_entry_var(gamma, n);
        removed_++;
      }
    }
  }

  void
  sweep_theta(NodeId theta)
  {
    std::vector<std::size_t> dead;
    for (std::size_t n = 0; n < graph_.num_loop_vars(theta); n++)
    {
      auto lv = graph_.loop_var(theta, n);
      if (!alive(lv.output) && !alive(lv.argument))
      {
        graph_.set_origin(lv.result, lv.argument);
        dead.push_back(n);
      }
    }
    sweep_region(graph_.subregion(theta));
    for (auto it = dead.rbegin(); it != dead.rend(); ++it)
    {
      graph_.remove_loop_var(theta, *it);
      removed_++;
    }
  }

  void
  sweep_context_vars(NodeId node)
  {
    for (std::size_t n = graph_.num_context_vars(node); n-- > 0;)
    {
      if (!alive(graph_.context_var(node, n).argument))
      {
        graph_.remove_context_var(node, n);
        removed_++;
      }
    }
  }

  void
  sweep_phi(NodeId phi)
  {
    std::vector<std::size_t> dead;
    for (std::size_t n = 0; n < graph_.num_recursion_vars(phi); n++)
    {
      auto rv = graph_.recursion_var(phi, n);
      if (!alive(rv.output))
      {
        graph_.set_origin(rv.result, rv.argument);
        dead.push_back(n);
      }
    }
    sweep_region(graph_.subregion(phi));
    for (auto it = dead.rbegin(); it != dead.rend(); ++it)
    {
      graph_.remove_recursion_var(phi, *it);
      removed_++;
    }
    sweep_context_vars(phi);
  }

  Graph & graph_;
  std::unordered_set<OriginId> alive_;
  std::size_t removed_ = 0;
};

}

std::unordered_set<OriginId>
dne_mark(const Graph & graph)
{
  return Marker(graph).run();
}

std::size_t
dne(Graph & graph)
{
  return Sweeper(graph, dne_mark(graph)).run();
}

}
