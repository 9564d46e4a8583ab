#include "support.hpp"

#include <rvsdg/passes.hpp>
#include <rvsdg/value.hpp>

#include <bit>

namespace rvsdg
{

namespace
{

const Operation *
constant_op(const Graph & graph, OriginId origin)
{
  if (graph.is_argument(origin))
    return nullptr;
  auto node = graph.producer(origin);
  if (!graph.is_simple(node) || graph.operation(node).code() != OpCode::Constant)
    return nullptr;
  return &graph.operation(node);
}

std::optional<std::uint64_t>
int_constant(const Graph & graph, OriginId origin)
{
  auto op = constant_op(graph, origin);
  if (!op || op->result_type().kind() != TypeKind::Integer)
    return std::nullopt;
  return op->int_value();
}

/// Alternative selected by a predicate computed by a match on a constant.
std::optional<unsigned>
constant_predicate(const Graph & graph, OriginId predicate)
{
  if (graph.is_argument(predicate))
    return std::nullopt;
  auto node = graph.producer(predicate);
  if (!graph.is_simple(node) || graph.operation(node).code() != OpCode::Match)
    return std::nullopt;
  auto value = int_constant(graph, graph.origin(graph.input(node, 0)));
  if (!value)
    return std::nullopt;
  return graph.operation(node).select(*value);
}

class Reducer
{
public:
  explicit Reducer(Graph & graph)
      : graph_(graph)
  {}

  std::size_t
  reduce_region(RegionId region)
  {
    std::size_t changes = 0;
    for (auto node : graph_.topological_order(region))
    {
      if (!graph_.is_alive(node))
        continue;
      if (graph_.is_simple(node))
      {
        if (fold(node) || simplify(node))
          changes++;
        continue;
      }
      if (graph_.kind(node) == NodeKind::Gamma && reduce_gamma(node))
      {
        changes++;
        continue;
      }
      for (auto sub : std::vector<RegionId>(graph_.subregions(node)))
        changes += reduce_region(sub);
    }
    return changes;
  }

private:
  OriginId
  constant(RegionId region, const Type & type, std::uint64_t bits)
  {
    return graph_.output(graph_.add_simple(region, Operation::int_constant(type, bits), {}), 0);
  }

  bool
  replace(NodeId node, OriginId with)
  {
    return graph_.divert_users(graph_.output(node, 0), with) != 0;
  }

  bool
  fold(NodeId node)
  {
    const auto & op = graph_.operation(node);
    if (op.is_stateful() || op.is_nullary() || graph_.users(graph_.output(node, 0)).empty())
      return false;
    auto region = graph_.parent(node);
    if (op.code() == OpCode::CtlToInt)
    {
      auto selected = constant_predicate(graph_, graph_.origin(graph_.input(node, 0)));
      return selected && replace(node, constant(region, op.result_type(), *selected));
    }
    if (op.code() == OpCode::Match || op.code() == OpCode::Gep)
      return false;

    std::vector<Value> values;
    for (auto input : graph_.inputs(node))
    {
      auto c = constant_op(graph_, graph_.origin(input));
      if (!c)
        return false;
      values.push_back(
          c->result_type().kind() == TypeKind::Float ? Value::float64(c->float_value())
                                                     : Value::integer(c->result_type().width(), c->int_value()));
    }
    try
    {
      auto value = evaluate(op, values);
      auto type = graph_.type(graph_.output(node, 0));
      if (value.kind == TypeKind::Integer)
        return replace(node, constant(region, type, value.bits));
      if (value.kind == TypeKind::Float)
      {
        auto c = graph_.add_simple(region, Operation::float_constant(std::bit_cast<double>(value.bits)), {});
        return replace(node, graph_.output(c, 0));
      }
    }
    catch (const Trap &)
    {}
    return false;
  }

  bool
  simplify(NodeId node)
  {
    const auto & op = graph_.operation(node);
    if (!op.is_binary() || op.type().kind() != TypeKind::Integer
        || graph_.users(graph_.output(node, 0)).empty())
      return false;
    auto lhs = graph_.origin(graph_.input(node, 0));
    auto rhs = graph_.origin(graph_.input(node, 1));
    auto l = int_constant(graph_, lhs);
    auto r = int_constant(graph_, rhs);
    auto region = graph_.parent(node);
    auto zero = [&]
    {
      return constant(region, op.type(), 0);
    };

    switch (op.code())
    {
    case OpCode::Add:
    case OpCode::Or:
    case OpCode::Xor:
      if (r == 0u)
        return replace(node, lhs);
      if (l == 0u)
        return replace(node, rhs);
      if (lhs == rhs && op.code() == OpCode::Or)
        return replace(node, lhs);
      if (lhs == rhs && op.code() == OpCode::Xor)
        return replace(node, zero());
      break;
    case OpCode::Sub:
      if (r == 0u)
        return replace(node, lhs);
      if (lhs == rhs)
        return replace(node, zero());
      break;
    case OpCode::Mul:
      if (r == 1u)
        return replace(node, lhs);
      if (l == 1u)
        return replace(node, rhs);
      if (r == 0u)
        return replace(node, rhs);
      if (l == 0u)
        return replace(node, lhs);
      break;
    case OpCode::Div:
      if (r == 1u)
        return replace(node, lhs);
      break;
    case OpCode::Shl:
    case OpCode::Shr:
      if (r == 0u)
        return replace(node, lhs);
      break;
    case OpCode::And:
      if (lhs == rhs)
        return replace(node, lhs);
      if (r == 0u)
        return replace(node, rhs);
      if (l == 0u)
        return replace(node, lhs);
      break;
    default:
      break;
    }
    return false;
  }

  /// Replaces a γ-node with a constant predicate by a copy of the selected alternative.
  bool
  reduce_gamma(NodeId gamma)
  {
    auto selected = constant_predicate(graph_, graph_.origin(graph_.input(gamma, 0)));
    if (!selected)
      return false;
    auto sub = graph_.subregion(gamma, *selected);
    auto region = graph_.parent(gamma);
    SubstitutionMap smap;
    for (std::size_t n = 0; n < graph_.num_entry_vars(gamma); n++)
      smap[graph_.argument(sub, n)] = graph_.origin(graph_.input(gamma, n + 1));
    auto results = detail::inline_region(graph_, sub, region, smap);
    for (std::size_t n = 0; n < results.size(); n++)
      graph_.divert_users(graph_.output(gamma, n), results[n]);
    graph_.remove_node(gamma);
    return true;
  }

  Graph & graph_;
};

}

std::size_t
red(Graph & graph)
{
  std::size_t total = 0;
  for (unsigned round = 0; round < reduction_rounds; round++)
  {
    auto changes = Reducer(graph).reduce_region(graph.root());
    if (!changes)
      break;
    total += changes;
  }
  return total;
}

}
