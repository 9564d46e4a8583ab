#include <rvsdg/construction.hpp>
#include <rvsdg/dump.hpp>
#include <rvsdg/error.hpp>
#include <rvsdg/interp.hpp>
#include <rvsdg/oracle.hpp>
#include <rvsdg/passes.hpp>

#include <corpus.hpp>
#include <generator.hpp>

#include <gtest/gtest.h>

#include <map>

using namespace rvsdg;

namespace
{

Value
i64(std::int64_t v)
{
  return Value::integer(64, static_cast<std::uint64_t>(v));
}

const Type int64 = Type::integer(64);

std::vector<ir::Module>
all_inputs()
{
  std::vector<ir::Module> modules;
  for (const auto & name : test::corpus_names())
    modules.push_back(test::corpus_module(name));
  for (std::uint64_t seed = 0; seed < test::random_corpus_size; seed++)
    modules.push_back(test::random_module(seed));
  return modules;
}

const std::vector<ir::Module> &
inputs()
{
  static const auto modules = all_inputs();
  return modules;
}

Graph
after(const std::string & name, const std::string & passes)
{
  auto graph = construct(test::corpus_module(name));
  PassConfig config;
  config.passes = parse_pass_list(passes);
  run_pipeline(graph, config);
  return graph;
}

NodeId
find_node(const Graph & graph, RegionId region, NodeKind kind)
{
  for (auto node : graph.nodes(region))
  {
    if (graph.kind(node) == kind)
      return node;
    for (auto sub : graph.subregions(node))
    {
      auto found = find_node(graph, sub, kind);
      if (found.valid())
        return found;
    }
  }
  return {};
}

std::size_t
count_ops(const Graph & graph, RegionId region, OpCode code)
{
  std::size_t n = 0;
  for (auto node : graph.nodes(region))
  {
    if (graph.is_simple(node) && graph.operation(node).code() == code)
      n++;
  }
  return n;
}

void
expect_equivalent(const ir::Module & module, const Graph & graph, const std::string & what)
{
  auto report = check_equivalence(module, cfg_evaluator(module), rvsdg_evaluator(graph), 50, 17);
  EXPECT_TRUE(report.ok()) << what << ": " << (report.ok() ? "" : report.failures.front()) << "\n"
                           << ir::print(module);
}

/**
 * fn(i64 n) -> i64 summing 0..n-1 with a θ whose body is a γ on the loop predicate plus the
 * comparison computing it.
 */
Graph
invertible_loop()
{
  Graph graph;
  auto lambda = graph.add_lambda(graph.root(), "sum", FunctionSignature{ { int64 }, { int64 } });
  auto body = graph.subregion(lambda);
  auto n = graph.lambda_parameter(lambda, 0);
  auto zero = graph.output(graph.add_simple(body, Operation::int_constant(int64, 0), {}), 0);

  auto theta = graph.add_theta(body);
  auto loop = graph.subregion(theta);
  auto i = graph.add_loop_var(theta, zero);
  auto s = graph.add_loop_var(theta, zero);
  auto bound = graph.add_loop_var(theta, n);
  auto lt = graph.output(
      graph.add_simple(loop, Operation::compare(OpCode::Lt, int64), { i.argument, bound.argument }),
      0);
  auto match = Operation::match(Type::integer(1), { { 0, 0 } }, 1, 2);
  auto predicate = graph.output(graph.add_simple(loop, match, { lt }), 0);

  auto gamma = graph.add_gamma(loop, predicate);
  auto gi = graph.add_entry_var(gamma, i.argument);
  auto gs = graph.add_entry_var(gamma, s.argument);
  auto repeat = graph.subregion(gamma, 1);
  auto one = graph.output(graph.add_simple(repeat, Operation::int_constant(int64, 1), {}), 0);
  auto next_i = graph.output(
      graph.add_simple(repeat, Operation::binary(OpCode::Add, int64), { gi.arguments[1], one }),
      0);
  auto next_s = graph.output(
      graph.add_simple(
          repeat,
          Operation::binary(OpCode::Add, int64),
          { gs.arguments[1], gi.arguments[1] }),
      0);
  OriginId out_i[] = { gi.arguments[0], next_i };
  OriginId out_s[] = { gs.arguments[0], next_s };
  auto ei = graph.add_exit_var(gamma, out_i);
  auto es = graph.add_exit_var(gamma, out_s);

  graph.set_predicate(theta, predicate);
  graph.set_origin(i.result, ei.output);
  graph.set_origin(s.result, es.output);

  OriginId results[] = { s.output, graph.argument(body, 1), graph.argument(body, 2) };
  graph.set_lambda_results(lambda, results);
  graph.add_export(graph.output(lambda, 0), "sum");
  return graph;
}

}

TEST(PassList, ParsesNamesAndRejectsUnknown)
{
  EXPECT_EQ(parse_pass_list("DNE,CNE"), (std::vector<Pass>{ Pass::DNE, Pass::CNE }));
  EXPECT_EQ(parse_pass_list(" ILN  URL "), (std::vector<Pass>{ Pass::ILN, Pass::URL }));
  EXPECT_TRUE(parse_pass_list("").empty());
  EXPECT_THROW(parse_pass_list("DNE,FOO"), Error);
  EXPECT_EQ(PassConfig{}.passes.size(), 18u);
  for (auto pass : all_passes)
    EXPECT_EQ(pass_from_name(pass_name(pass)), pass);
}

TEST(Passes, EachPassPreservesBehaviorAndInvariants)
{
  std::vector<std::pair<std::string, PassConfig>> configs;
  for (auto pass : all_passes)
  {
    PassConfig config;
    config.passes = { pass };
    configs.emplace_back(std::string(pass_name(pass)), config);
  }
  configs.emplace_back("pipeline", PassConfig{});

  for (const auto & [label, config] : configs)
  {
    for (const auto & module : inputs())
    {
      auto graph = construct(module);
      run_pipeline(graph, config);
      auto violations = graph.validate();
      ASSERT_TRUE(violations.empty()) << label << ": " << violations.front() << "\n"
                                      << ir::print(module);
      expect_equivalent(module, graph, label);
    }
  }
}

TEST(Passes, PipelineRecordsEveryPass)
{
  auto graph = construct(test::corpus_module("while_loop"));
  auto stats = run_pipeline(graph);
  ASSERT_EQ(stats.records.size(), 18u);
  EXPECT_EQ(stats.records.front().pass, Pass::ILN);
  EXPECT_EQ(stats.records.back().pass, Pass::DNE);
  EXPECT_EQ(stats.records.back().nodes_after, graph.num_nodes());
  EXPECT_NE(stats.str().find("pass.0.ILN.nodes_before="), std::string::npos);
}

TEST(Passes, DisabledPassesAreSkipped)
{
  auto graph = construct(test::corpus_module("cne_kernel"));
  PassConfig config;
  config.disabled = { Pass::CNE };
  run_pipeline(graph, config);
  auto stats = graph_stats(graph);
  EXPECT_EQ(stats["ops.mul"], 4u);
}

TEST(Cne, MergesCongruentMultiplicationsOnly)
{
  auto before = construct(test::corpus_module("cne_kernel"));
  EXPECT_EQ(graph_stats(before)["ops.mul"], 4u);
  auto graph = after("cne_kernel", "CNE,DNE");
  auto stats = graph_stats(graph);
  EXPECT_EQ(stats["ops.mul"], 3u);
  EXPECT_EQ(stats["ops.add"], 2u);
  EXPECT_EQ(stats["ops.const"], 4u);
  EXPECT_TRUE(graph.validate().empty());
}

TEST(Cne, KeepsLoadsWithDifferentStates)
{
  auto graph = after("loads_states", "CNE,DNE");
  EXPECT_EQ(graph_stats(graph)["ops.load"], 2u);
  expect_equivalent(test::corpus_module("loads_states"), graph, "CNE,DNE");
}

TEST(Cne, MergesIdenticalConstants)
{
  auto module = ir::parse(
      "define i64 @f(i64 %v) {\n"
      "  %a = add i64 %v, 5\n"
      "  %b = mul i64 %a, 5\n"
      "  ret %b\n"
      "}\n");
  auto graph = construct(module);
  EXPECT_EQ(graph_stats(graph)["ops.const"], 2u);
  EXPECT_GT(cne(graph), 0u);
  dne(graph);
  EXPECT_EQ(graph_stats(graph)["ops.const"], 1u);
  expect_equivalent(module, graph, "CNE,DNE");
}

TEST(Dne, KernelLiveSet)
{
  auto graph = construct(test::corpus_module("cne_kernel"));
  auto live = dne_mark(graph);
  std::map<std::string, std::size_t> dead;
  graph.walk(
      graph.root(),
      [&](NodeId node)
      {
        if (graph.is_simple(node) && !live.count(graph.output(node, 0)))
          dead[std::string(graph.operation(node).name())]++;
      });
  // the xor chain of u, its initial value, and v = u + 1
  EXPECT_EQ(dead, (std::map<std::string, std::size_t>{ { "add", 1 }, { "const", 2 }, { "xor", 1 } }));

  dne(graph);
  auto stats = graph_stats(graph);
  EXPECT_EQ(stats["nodes"], 20u);
  EXPECT_EQ(stats["nodes.simple"], 17u);
  EXPECT_EQ(stats["nodes.gamma"], 1u);
  EXPECT_EQ(stats["nodes.theta"], 1u);
  EXPECT_EQ(stats["nodes.lambda"], 1u);
  EXPECT_EQ(stats["ops.mul"], 4u);
  EXPECT_EQ(stats["ops.add"], 3u);
  EXPECT_EQ(stats["ops.const"], 6u);
  EXPECT_EQ(stats["ops.lt"], 2u);
  EXPECT_EQ(stats["ops.match"], 2u);
  EXPECT_EQ(stats.count("ops.xor"), 0u);
  EXPECT_EQ(stats["regions"], 5u);
  EXPECT_EQ(stats["depth"], 2u);

  auto theta = find_node(graph, graph.root(), NodeKind::Theta);
  auto gamma = find_node(graph, graph.root(), NodeKind::Gamma);
  ASSERT_TRUE(theta.valid() && gamma.valid());
  // io, mem, i, n, q, s, x and y
  EXPECT_EQ(graph.num_loop_vars(theta), 8u);
  // io, mem, q and s
  EXPECT_EQ(graph.num_entry_vars(gamma), 4u);
}

TEST(Dne, RemovesUnusedFunctionsAndLoopValues)
{
  auto graph = after("dead_code", "DNE");
  auto stats = graph_stats(graph);
  EXPECT_EQ(stats["nodes.lambda"], 1u);
  EXPECT_EQ(stats.count("ops.mul"), 0u);
  expect_equivalent(test::corpus_module("dead_code"), graph, "DNE");
}

TEST(Dne, IsIdempotent)
{
  for (const auto & module : inputs())
  {
    auto graph = construct(module);
    dne(graph);
    auto once = dump(graph);
    EXPECT_EQ(dne(graph), 0u);
    EXPECT_EQ(dump(graph), once);
  }
}

TEST(Red, FoldsConstantsAndConstantBranches)
{
  auto graph = after("constants", "RED,DNE");
  auto stats = graph_stats(graph);
  EXPECT_EQ(stats.count("nodes.gamma"), 0u);
  EXPECT_EQ(stats.count("ops.mul"), 0u);
  EXPECT_EQ(stats.count("ops.sub"), 0u);
  EXPECT_EQ(stats["ops.add"], 1u);
  EXPECT_EQ(stats["ops.const"], 1u);
  expect_equivalent(test::corpus_module("constants"), graph, "RED,DNE");
}

TEST(Inv, RedirectsInvariantLoopVariables)
{
  auto graph = construct(test::corpus_module("invariant_gamma"));
  auto theta = find_node(graph, graph.root(), NodeKind::Theta);
  auto before = graph.num_loop_vars(theta);
  EXPECT_GT(inv(graph), 0u);
  dne(graph);
  EXPECT_LT(graph.num_loop_vars(theta), before);
  expect_equivalent(test::corpus_module("invariant_gamma"), graph, "INV,DNE");
}

TEST(Psh, HoistsInvariantComputations)
{
  auto graph = construct(test::corpus_module("invariant_gamma"));
  auto lambda = find_node(graph, graph.root(), NodeKind::Lambda);
  auto body = graph.subregion(lambda);
  auto before = count_ops(graph, body, OpCode::Add);
  // y reaches y + 7 through the γ-node until INV redirects it
  inv(graph);
  EXPECT_GT(psh(graph), 0u);
  EXPECT_EQ(count_ops(graph, body, OpCode::Add), before + 1);
  EXPECT_TRUE(graph.validate().empty());
  expect_equivalent(test::corpus_module("invariant_gamma"), graph, "INV,PSH");
}

TEST(Pll, SinksIntoSingleAlternative)
{
  auto graph = construct(test::corpus_module("kernel_loop_cond"));
  EXPECT_GT(pll(graph), 0u);
  EXPECT_TRUE(graph.validate().empty());
  expect_equivalent(test::corpus_module("kernel_loop_cond"), graph, "PLL");
}

TEST(Iln, InlinesCallChain)
{
  auto graph = after("calls_chain", "ILN,DNE");
  auto stats = graph_stats(graph);
  EXPECT_EQ(stats["nodes.lambda"], 1u);
  EXPECT_EQ(stats.count("ops.apply"), 0u);
  expect_equivalent(test::corpus_module("calls_chain"), graph, "ILN,DNE");
}

TEST(Iln, LeavesRecursionAlone)
{
  auto graph = after("mutual_recursion", "ILN,DNE");
  EXPECT_GT(graph_stats(graph)["ops.apply"], 0u);
  expect_equivalent(test::corpus_module("mutual_recursion"), graph, "ILN,DNE");
}

TEST(Ivt, InvertsLoopAroundGamma)
{
  auto graph = invertible_loop();
  ASSERT_TRUE(graph.validate().empty());
  auto reference = [&](const Graph & g)
  {
    std::vector<EvalResult> results;
    for (std::int64_t n = -2; n < 12; n++)
    {
      Value args[] = { i64(n) };
      results.push_back(eval_rvsdg(g, "sum", args));
    }
    return results;
  };
  auto before = reference(graph);
  for (std::int64_t n = 0; n < 12; n++)
    EXPECT_EQ(before[n + 2].results.at(0), i64(n * (n - 1) / 2));

  EXPECT_EQ(ivt(graph), 1u);
  ASSERT_TRUE(graph.validate().empty());
  // the loop now sits inside a γ-node
  auto gamma = find_node(graph, graph.subregion(find_node(graph, graph.root(), NodeKind::Lambda)), NodeKind::Gamma);
  ASSERT_TRUE(gamma.valid());
  EXPECT_EQ(graph.parent(gamma), graph.subregion(find_node(graph, graph.root(), NodeKind::Lambda)));
  auto after_ivt = reference(graph);
  for (std::size_t k = 0; k < before.size(); k++)
    EXPECT_FALSE(compare_behavior(before[k], after_ivt[k]).has_value()) << k;
}

TEST(Ivt, SkipsLoopsWithStatefulGlue)
{
  auto graph = construct(test::corpus_module("io_loop"));
  auto text = dump(graph);
  EXPECT_EQ(ivt(graph), 0u);
  EXPECT_EQ(dump(graph), text);
}

TEST(Url, CountedLoopsAgreeForAllTripCounts)
{
  auto module = test::corpus_module("counted_loop");
  for (unsigned factor : { 1u, 2u, 4u })
  {
    auto graph = construct(module);
    url(graph, factor);
    ASSERT_TRUE(graph.validate().empty());
    for (std::int64_t trips = 0; trips <= 17; trips++)
    {
      Value args[] = { i64(trips) };
      auto source = eval_cfg(module, "sum", args);
      auto unrolled = eval_rvsdg(graph, "sum", args);
      ASSERT_TRUE(source.ok());
      EXPECT_EQ(source.results, unrolled.results) << "factor " << factor << " trips " << trips;
      EXPECT_EQ(unrolled.results.at(0), i64(trips * (trips - 1) / 2));
    }
  }
}

TEST(Url, FactorOneIsIdentity)
{
  for (const auto & name : test::corpus_names())
  {
    auto graph = construct(test::corpus_module(name));
    auto text = dump(graph);
    EXPECT_EQ(url(graph, 1), 0u);
    EXPECT_EQ(dump(graph), text) << name;
  }
}

TEST(Url, UnrollsInnerLoopsOnly)
{
  auto graph = construct(test::corpus_module("nested_loops"));
  EXPECT_EQ(url(graph, 2), 1u);
  EXPECT_TRUE(graph.validate().empty());
  expect_equivalent(test::corpus_module("nested_loops"), graph, "URL");
}

TEST(Determinism, DumpDotAndStatsRepeat)
{
  for (const auto & name : test::corpus_names())
  {
    auto a = after(name, default_pass_order);
    auto b = after(name, default_pass_order);
    EXPECT_EQ(dump(a), dump(b)) << name;
    EXPECT_EQ(to_dot(a), to_dot(b)) << name;
    EXPECT_EQ(graph_stats(a), graph_stats(b)) << name;
  }
}
