#include <rvsdg/dump.hpp>
#include <rvsdg/error.hpp>
#include <rvsdg/graph.hpp>
#include <rvsdg/value.hpp>

#include <gtest/gtest.h>

#include <cstdint>
#include <limits>
#include <map>
#include <random>

using namespace rvsdg;

namespace
{

const Type i1 = Type::integer(1);
const Type i8 = Type::integer(8);
const Type i64 = Type::integer(64);

Value
eval2(OpCode code, const Type & type, std::uint64_t a, std::uint64_t b)
{
  Value args[] = { Value::integer(type.width(), a), Value::integer(type.width(), b) };
  return evaluate(Operation::binary(code, type), args);
}

/// λ of type fn(i64, i64) -> i64 in the root region, exported as @name.
struct LambdaFixture
{
  Graph graph;
  NodeId lambda;
  RegionId body;
  OriginId x;
  OriginId y;
  OriginId mem;
  OriginId io;

  explicit LambdaFixture(const std::string & name = "f")
  {
    lambda = graph.add_lambda(graph.root(), name, FunctionSignature{ { i64, i64 }, { i64 } });
    body = graph.subregion(lambda);
    x = graph.lambda_parameter(lambda, 0);
    y = graph.lambda_parameter(lambda, 1);
    mem = graph.argument(body, 2);
    io = graph.argument(body, 3);
  }

  void
  finish(OriginId result)
  {
    OriginId results[] = { result, mem, io };
    graph.set_lambda_results(lambda, results);
    graph.add_export(graph.output(lambda, 0), graph.name(lambda));
  }

  OriginId
  constant(RegionId region, std::uint64_t value)
  {
    return graph.output(graph.add_simple(region, Operation::int_constant(i64, value), {}), 0);
  }

  OriginId
  binary(RegionId region, OpCode code, OriginId a, OriginId b)
  {
    return graph.output(graph.add_simple(region, Operation::binary(code, i64), { a, b }), 0);
  }

  OriginId
  predicate(RegionId region, OriginId value)
  {
    auto match = Operation::match(i1, { { 0, 0 } }, 1, 2);
    return graph.output(graph.add_simple(region, match, { value }), 0);
  }
};

}

TEST(Types, SelectorIsNarrowestCoveringInteger)
{
  EXPECT_EQ(Type::selector_for(2), i1);
  EXPECT_EQ(Type::selector_for(3), i8);
  EXPECT_EQ(Type::selector_for(256), i8);
  EXPECT_EQ(Type::selector_for(257), Type::integer(16));
  EXPECT_EQ(Type::selector_for(70000), Type::integer(32));
}

TEST(Types, StateAndValueKinds)
{
  EXPECT_TRUE(Type::memory_state().is_state());
  EXPECT_TRUE(Type::io_state().is_state());
  EXPECT_TRUE(Type::control(3).is_value());
  EXPECT_EQ(Type::control(3).alternatives(), 3u);
  EXPECT_EQ(Type::function({ i64 }, { i64 }), Type::function({ i64 }, { i64 }));
  EXPECT_NE(Type::function({ i64 }, { i64 }), Type::function({ i8 }, { i64 }));
}

TEST(Evaluate, IntegerArithmeticWraps)
{
  EXPECT_EQ(eval2(OpCode::Add, i8, 127, 1).signed_value(), -128);
  EXPECT_EQ(eval2(OpCode::Sub, i8, 0, 1).bits, 0xffu);
  EXPECT_EQ(eval2(OpCode::Mul, i64, 1ull << 63, 2).bits, 0u);
}

TEST(Evaluate, DivisionTruncatesTowardZero)
{
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::int64_t> dist(-1000, 1000);
  for (int n = 0; n < 500; n++)
  {
    auto a = dist(rng);
    auto b = dist(rng);
    if (b == 0)
      continue;
    EXPECT_EQ(eval2(OpCode::Div, i64, a, b).signed_value(), a / b);
    EXPECT_EQ(eval2(OpCode::Rem, i64, a, b).signed_value(), a % b);
  }
  auto min = static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::min());
  EXPECT_EQ(eval2(OpCode::Div, i64, min, static_cast<std::uint64_t>(-1)).bits, min);
  EXPECT_EQ(eval2(OpCode::Rem, i64, min, static_cast<std::uint64_t>(-1)).bits, 0u);
}

TEST(Evaluate, DivisionByZeroTraps)
{
  try
  {
    eval2(OpCode::Div, i64, 7, 0);
    FAIL() << "no trap";
  }
  catch (const Trap & trap)
  {
    EXPECT_EQ(trap.kind(), TrapKind::DivisionByZero);
  }
}

TEST(Evaluate, ShiftRightIsArithmetic)
{
  EXPECT_EQ(eval2(OpCode::Shr, i8, 0x80, 1).bits, 0xc0u);
  EXPECT_EQ(eval2(OpCode::Shl, i8, 1, 7).bits, 0x80u);
}

TEST(Evaluate, MatchSelectsCaseOrDefault)
{
  auto op = Operation::match(i64, { { 5, 0 }, { 9, 2 } }, 1, 3);
  EXPECT_EQ(op.select(5), 0u);
  EXPECT_EQ(op.select(9), 2u);
  EXPECT_EQ(op.select(4), 1u);
  EXPECT_EQ(op.output_types().front(), Type::control(3));
}

TEST(Operation, Properties)
{
  EXPECT_TRUE(Operation::binary(OpCode::Add, i64).is_commutative());
  EXPECT_FALSE(Operation::binary(OpCode::Sub, i64).is_commutative());
  EXPECT_TRUE(Operation::binary(OpCode::Div, i64).may_trap());
  EXPECT_TRUE(Operation::load(i64).is_stateful());
  EXPECT_FALSE(Operation::gep(i64).is_stateful());
  EXPECT_TRUE(Operation::int_constant(i64, 3).is_nullary());
}

TEST(Graph, LambdaBuildsValidGraph)
{
  LambdaFixture f;
  auto sum = f.binary(f.body, OpCode::Add, f.x, f.y);
  f.finish(sum);
  EXPECT_TRUE(f.graph.validate().empty());
  EXPECT_EQ(f.graph.num_nodes(NodeKind::Lambda), 1u);
  EXPECT_EQ(f.graph.num_nodes(NodeKind::Simple), 1u);
  EXPECT_EQ(f.graph.depth(f.body), 1u);
}

TEST(Graph, TopologicalOrderPlacesProducersFirst)
{
  LambdaFixture f;
  auto a = f.binary(f.body, OpCode::Add, f.x, f.y);
  auto b = f.binary(f.body, OpCode::Mul, a, f.x);
  auto c = f.binary(f.body, OpCode::Sub, b, a);
  f.finish(c);
  auto order = f.graph.topological_order(f.body);
  std::map<NodeId, std::size_t> position;
  for (std::size_t n = 0; n < order.size(); n++)
    position[order[n]] = n;
  for (auto node : order)
  {
    for (auto input : f.graph.inputs(node))
    {
      auto origin = f.graph.origin(input);
      if (!f.graph.is_argument(origin))
        EXPECT_LT(position[f.graph.producer(origin)], position[node]);
    }
  }
}

TEST(Graph, EdgesMustStayInsideRegionAndMatchTypes)
{
  LambdaFixture f;
  auto gamma = f.graph.add_gamma(f.body, f.predicate(f.body, f.graph.output(f.graph.add_simple(f.body, Operation::compare(OpCode::Lt, i64), { f.x, f.y }), 0)));
  auto inner = f.graph.subregion(gamma, 0);
  EXPECT_THROW(
      f.graph.add_simple(inner, Operation::binary(OpCode::Add, i64), { f.x, f.y }),
      GraphError);
  EXPECT_THROW(f.graph.add_simple(f.body, Operation::binary(OpCode::Add, i8), { f.x, f.y }), GraphError);
}

TEST(Graph, GammaPredicateNeedsTwoAlternatives)
{
  LambdaFixture f;
  EXPECT_THROW(f.graph.add_gamma(f.body, f.x), GraphError);
}

TEST(Graph, GammaVariablesPairUp)
{
  LambdaFixture f;
  auto lt = f.graph.output(f.graph.add_simple(f.body, Operation::compare(OpCode::Lt, i64), { f.x, f.y }), 0);
  auto gamma = f.graph.add_gamma(f.body, f.predicate(f.body, lt));
  auto ex = f.graph.add_entry_var(gamma, f.x);
  auto ey = f.graph.add_entry_var(gamma, f.y);
  ASSERT_EQ(ex.arguments.size(), 2u);
  EXPECT_EQ(f.graph.input(gamma, 1), ex.input);
  EXPECT_EQ(f.graph.input(gamma, 2), ey.input);
  OriginId origins[] = { ex.arguments[0], ey.arguments[1] };
  auto out = f.graph.add_exit_var(gamma, origins);
  f.finish(out.output);
  EXPECT_TRUE(f.graph.validate().empty());
  EXPECT_EQ(f.graph.structural_input(ex.arguments[1]), ex.input);
  EXPECT_EQ(f.graph.structural_output(out.results[0]), out.output);
}

TEST(Graph, ThetaLoopVariableIndexing)
{
  LambdaFixture f;
  auto theta = f.graph.add_theta(f.body);
  auto body = f.graph.subregion(theta);
  auto lv = f.graph.add_loop_var(theta, f.x);
  auto n = f.graph.add_loop_var(theta, f.y);
  auto next = f.binary(body, OpCode::Add, lv.argument, f.constant(body, 1));
  f.graph.set_origin(lv.result, next);
  auto lt = f.graph.output(f.graph.add_simple(body, Operation::compare(OpCode::Lt, i64), { next, n.argument }), 0);
  f.graph.set_predicate(theta, f.predicate(body, lt));
  f.finish(lv.output);

  EXPECT_TRUE(f.graph.validate().empty());
  EXPECT_EQ(f.graph.index(lv.argument), 0u);
  EXPECT_EQ(f.graph.index(lv.result), 1u);
  EXPECT_EQ(f.graph.index(n.result), 2u);
  EXPECT_EQ(f.graph.result(body, 0), f.graph.predicate(theta));
  EXPECT_EQ(f.graph.loop_var(theta, 1).output, n.output);
}

TEST(Graph, DivertAndRemove)
{
  LambdaFixture f;
  auto a = f.binary(f.body, OpCode::Add, f.x, f.y);
  auto b = f.binary(f.body, OpCode::Add, f.x, f.y);
  auto c = f.binary(f.body, OpCode::Mul, a, b);
  f.finish(c);
  EXPECT_THROW(f.graph.remove_node(f.graph.producer(b)), GraphError);
  EXPECT_EQ(f.graph.divert_users(b, a), 1u);
  f.graph.remove_node(f.graph.producer(b));
  EXPECT_TRUE(f.graph.validate().empty());
  EXPECT_EQ(f.graph.users(a).size(), 2u);
  EXPECT_FALSE(f.graph.is_alive(f.graph.producer(b)));
}

TEST(Graph, CopyNodeCopiesSubregions)
{
  LambdaFixture f;
  auto theta = f.graph.add_theta(f.body);
  auto body = f.graph.subregion(theta);
  auto lv = f.graph.add_loop_var(theta, f.x);
  auto next = f.binary(body, OpCode::Sub, lv.argument, f.constant(body, 1));
  f.graph.set_origin(lv.result, next);
  auto ne = f.graph.output(f.graph.add_simple(body, Operation::compare(OpCode::Gt, i64), { next, f.constant(body, 0) }), 0);
  f.graph.set_predicate(theta, f.predicate(body, ne));

  SubstitutionMap smap{ { f.x, f.y } };
  auto copy = f.graph.copy_node(theta, f.body, smap);
  auto sum = f.binary(f.body, OpCode::Add, lv.output, f.graph.output(copy, 0));
  f.finish(sum);
  EXPECT_TRUE(f.graph.validate().empty());
  EXPECT_EQ(f.graph.origin(f.graph.input(copy, 0)), f.y);
  EXPECT_EQ(f.graph.num_nodes(NodeKind::Theta), 2u);
  EXPECT_EQ(f.graph.nodes(f.graph.subregion(copy)).size(), f.graph.nodes(body).size());
}

TEST(Graph, PhiRecursionVariableRemovalWithSelfReference)
{
  Graph graph;
  auto phi = graph.add_phi(graph.root());
  auto fn = Type::function({ i64 }, { i64 });
  auto rv = graph.add_recursion_var(phi, fn, "f");
  graph.set_recursion_result(phi, 0, rv.argument);
  EXPECT_TRUE(graph.validate().empty());
  graph.remove_recursion_var(phi, 0);
  EXPECT_EQ(graph.num_recursion_vars(phi), 0u);
  EXPECT_TRUE(graph.validate().empty());
}

TEST(Graph, ValidateReportsUnboundLambdaResults)
{
  Graph graph;
  graph.add_lambda(graph.root(), "f", FunctionSignature{ { i64 }, { i64 } });
  EXPECT_FALSE(graph.validate().empty());
}

TEST(Dump, IndependentOfHandleValues)
{
  // the same function built with a spare node created and removed first
  LambdaFixture a;
  a.finish(a.binary(a.body, OpCode::Add, a.x, a.y));
  LambdaFixture b;
  auto spare = b.binary(b.body, OpCode::Mul, b.x, b.x);
  b.graph.remove_node(b.graph.producer(spare));
  b.finish(b.binary(b.body, OpCode::Add, b.x, b.y));
  EXPECT_EQ(dump(a.graph), dump(b.graph));
  LambdaFixture c;
  c.finish(c.binary(c.body, OpCode::Add, c.x, c.y));
  EXPECT_EQ(to_dot(a.graph), to_dot(c.graph));
}

TEST(Stats, CountsKindsAndOperations)
{
  LambdaFixture f;
  auto a = f.binary(f.body, OpCode::Add, f.x, f.y);
  f.finish(f.binary(f.body, OpCode::Add, a, f.constant(f.body, 2)));
  auto stats = graph_stats(f.graph);
  EXPECT_EQ(stats["nodes"], 4u);
  EXPECT_EQ(stats["nodes.lambda"], 1u);
  EXPECT_EQ(stats["ops.add"], 2u);
  EXPECT_EQ(stats["ops.const"], 1u);
  EXPECT_EQ(stats["depth"], 1u);
}
