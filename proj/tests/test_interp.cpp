#include <rvsdg/construction.hpp>
#include <rvsdg/interp.hpp>
#include <rvsdg/oracle.hpp>

#include <corpus.hpp>

#include <gtest/gtest.h>

#include <numeric>
#include <random>

using namespace rvsdg;

namespace
{

Value
i64(std::int64_t v)
{
  return Value::integer(64, static_cast<std::uint64_t>(v));
}

EvalResult
run_cfg(const std::string & name, const std::string & fn, std::vector<Value> args, std::uint64_t fuel = default_fuel)
{
  return eval_cfg(test::corpus_module(name), fn, args, fuel);
}

EvalResult
run_rvsdg(const std::string & name, const std::string & fn, std::vector<Value> args)
{
  auto graph = construct(test::corpus_module(name));
  return eval_rvsdg(graph, fn, args);
}

}

TEST(CfgInterpreter, GcdMatchesEuclid)
{
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::int64_t> dist(1, 100000);
  auto module = test::corpus_module("gcd");
  CfgInterpreter interp(module);
  for (int n = 0; n < 200; n++)
  {
    auto a = dist(rng);
    auto b = dist(rng);
    Value args[] = { i64(a), i64(b) };
    auto result = interp.run("gcd", args);
    ASSERT_TRUE(result.ok());
    ASSERT_EQ(result.results.size(), 1u);
    EXPECT_EQ(result.results[0].signed_value(), std::gcd(a, b));
  }
  EXPECT_EQ(run_cfg("gcd", "gcd", { i64(12), i64(8) }).results[0], i64(4));
  EXPECT_EQ(run_cfg("gcd", "gcd", { i64(35), i64(35) }).results[0], i64(35));
  EXPECT_EQ(run_cfg("gcd", "gcd", { i64(9), i64(0) }).results[0], i64(9));
}

TEST(CfgInterpreter, CountedLoopMatchesClosedForm)
{
  for (std::int64_t n : { 0, 1, 2, 10, 63, 64, 100 })
  {
    auto m = n & 63;
    auto result = run_cfg("counted_loop", "sum", { i64(n) });
    ASSERT_TRUE(result.ok());
    EXPECT_EQ(result.results[0].signed_value(), m * (m - 1) / 2) << n;
  }
  EXPECT_EQ(run_cfg("counted_loop", "sum", { i64(10) }).results[0], i64(45));
}

TEST(CfgInterpreter, StoreThenLoadTrace)
{
  auto result = run_cfg("loads_states", "twice", { i64(5) });
  ASSERT_TRUE(result.ok());
  EXPECT_EQ(result.results[0], i64(11));
  EXPECT_EQ(serialize_trace(result.trace), "store 1 i64 5\nload 1\nstore 1 i64 6\nload 1\n");
}

TEST(CfgInterpreter, ThreeWaySwitch)
{
  EXPECT_EQ(run_cfg("switch3", "sel", { i64(0), i64(5) }).results[0], i64(15));
  EXPECT_EQ(run_cfg("switch3", "sel", { i64(1), i64(5) }).results[0], i64(25));
  EXPECT_EQ(run_cfg("switch3", "sel", { i64(2), i64(5) }).results[0], i64(-5));
  // selector 3 is out of range and takes the last target
  EXPECT_EQ(run_cfg("switch3", "sel", { i64(3), i64(5) }).results[0], i64(-5));
}

TEST(CfgInterpreter, GlobalsEvaluateInitializers)
{
  auto result = run_cfg("globals", "use", { i64(2) });
  ASSERT_TRUE(result.ok());
  EXPECT_EQ(result.results[0], i64(40 * 3 + 40 + 2));
}

TEST(CfgInterpreter, MutualRecursionParity)
{
  for (std::int64_t x : { 0, 1, 6, 7, 127, 128 })
  {
    auto result = run_cfg("mutual_recursion", "parity", { i64(x) });
    ASSERT_TRUE(result.ok());
    EXPECT_EQ(result.results[0], Value::integer(1, (x & 127) % 2 == 0)) << x;
  }
}

TEST(CfgInterpreter, DivisionByZeroTraps)
{
  auto guarded = run_cfg("div_trap", "safe", { i64(7), i64(0) });
  ASSERT_TRUE(guarded.ok());
  EXPECT_EQ(guarded.results[0], i64(0));
  auto fine = run_cfg("div_trap", "safe", { i64(7), i64(2) });
  ASSERT_TRUE(fine.ok());
  EXPECT_EQ(fine.results[0], i64(4));

  auto module = ir::parse("define i64 @q(i64 %a, i64 %b) {\n  %r = div i64 %a, %b\n  ret %r\n}\n");
  Value args[] = { i64(7), i64(0) };
  EXPECT_EQ(eval_cfg(module, "q", args).trap, TrapKind::DivisionByZero);
  EXPECT_EQ(eval_rvsdg(construct(module), "q", args).trap, TrapKind::DivisionByZero);
}

TEST(CfgInterpreter, FuelBoundsNonterminatingLoops)
{
  auto spin = run_cfg("nonterminating", "spin", { i64(1) }, 10'000);
  EXPECT_EQ(spin.trap, TrapKind::OutOfFuel);
  auto stop = run_cfg("nonterminating", "spin", { i64(2) }, 10'000);
  ASSERT_TRUE(stop.ok());
  EXPECT_EQ(stop.results[0], i64(2));
}

TEST(RvsdgInterpreter, AgreesWithCfgOnRecursivePrint)
{
  for (std::int64_t n : { 0, 1, 2, 5, 15, 16 })
  {
    auto cfg = run_cfg("recursive_print", "f", { i64(n) });
    auto graph = run_rvsdg("recursive_print", "f", { i64(n) });
    ASSERT_TRUE(cfg.ok());
    EXPECT_EQ(cfg.str(), graph.str()) << n;
    EXPECT_FALSE(compare_behavior(cfg, graph).has_value());
  }
  auto five = run_cfg("recursive_print", "f", { i64(5) });
  EXPECT_EQ(five.results[0], i64(120));
  EXPECT_EQ(
      serialize_trace(five.trace),
      "io @print(i64 1)\nio @print(i64 1)\nio @print(i64 2)\nio @print(i64 6)\nio @print(i64 24)\n");
}

TEST(RvsdgInterpreter, IndirectCalls)
{
  auto cfg = run_cfg("indirect_calls", "tot", { i64(4) });
  auto graph = run_rvsdg("indirect_calls", "tot", { i64(4) });
  ASSERT_TRUE(cfg.ok());
  // sum over i < 4 of 2i + (i + 3)
  EXPECT_EQ(cfg.results[0], i64(30));
  EXPECT_EQ(cfg.str(), graph.str());
}

TEST(RvsdgInterpreter, InputEventsAreDeterministic)
{
  auto cfg = run_cfg("io_loop", "echo", { i64(3) });
  auto graph = run_rvsdg("io_loop", "echo", { i64(3) });
  ASSERT_TRUE(cfg.ok());
  EXPECT_EQ(cfg.trace.size(), 6u);
  EXPECT_EQ(cfg.str(), graph.str());
}

TEST(CompareBehavior, SourceTrapAdmitsAnything)
{
  EvalResult source;
  source.trap = TrapKind::DivisionByZero;
  EvalResult target;
  target.results = { i64(3) };
  EXPECT_FALSE(compare_behavior(source, target).has_value());
  source.trap = TrapKind::OutOfFuel;
  EXPECT_FALSE(compare_behavior(source, target).has_value());
}

TEST(CompareBehavior, DetectsDifferences)
{
  EvalResult source;
  source.results = { i64(3) };
  EvalResult target = source;
  EXPECT_FALSE(compare_behavior(source, target).has_value());

  target.results = { i64(4) };
  EXPECT_TRUE(compare_behavior(source, target).has_value());

  target = source;
  target.trap = TrapKind::DivisionByZero;
  EXPECT_TRUE(compare_behavior(source, target).has_value());

  target = source;
  Event io;
  io.kind = EventKind::Io;
  io.name = "print";
  io.arguments = { i64(1) };
  target.trace.push_back(io);
  EXPECT_TRUE(compare_behavior(source, target).has_value());
  source.trace.push_back(io);
  source.trace.back().arguments = { i64(2) };
  EXPECT_TRUE(compare_behavior(source, target).has_value());
}

TEST(Oracle, RandomArgumentsMatchSignature)
{
  std::mt19937_64 rng(5);
  FunctionSignature signature{ { Type::integer(8), Type::integer(64), Type::float64() }, {} };
  auto args = random_arguments(signature, rng);
  ASSERT_EQ(args.size(), 3u);
  EXPECT_EQ(args[0].width, 8u);
  EXPECT_EQ(args[2].kind, TypeKind::Float);
}

TEST(Oracle, ReportsMismatchedEvaluator)
{
  auto module = test::corpus_module("counted_loop");
  Evaluator wrong = [&](std::string_view name, std::span<const Value> args, std::uint64_t fuel)
  {
    auto result = eval_cfg(module, name, args, fuel);
    if (result.ok())
      result.results[0].bits++;
    return result;
  };
  auto report = check_equivalence(module, cfg_evaluator(module), wrong, 10, 1);
  EXPECT_EQ(report.comparisons, 10u);
  EXPECT_EQ(report.failures.size(), 10u);
  auto same = check_equivalence(module, cfg_evaluator(module), cfg_evaluator(module), 10, 1);
  EXPECT_TRUE(same.ok());
  EXPECT_EQ(same.conclusive, 10u);
}
