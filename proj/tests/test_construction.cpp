#include <rvsdg/construction.hpp>
#include <rvsdg/dump.hpp>
#include <rvsdg/error.hpp>
#include <rvsdg/oracle.hpp>

#include <corpus.hpp>
#include <generator.hpp>
#include <rw_oracle.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace rvsdg;

namespace
{

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

std::size_t
check_tree(const ir::Entity & entity, const ControlTreeNode & node, std::string & first)
{
  std::set<std::size_t> blocks;
  std::set<std::size_t> entries;
  test::tree_blocks(node, blocks, entries);
  auto oracle = test::dataflow_rw(entity, blocks, entries);
  std::size_t mismatches = 0;
  if (test::source_variables(node.reads) != oracle.reads
      || test::source_variables(node.writes) != oracle.writes)
  {
    if (first.empty())
      first = entity.name + " at block " + entity.blocks[node.block].label;
    mismatches++;
  }
  for (const auto & child : node.children)
    mismatches += check_tree(entity, child, first);
  return mismatches;
}

std::string
set_text(const VariableSet & set)
{
  std::string text;
  for (const auto & v : set)
    text += (text.empty() ? "" : ",") + v;
  return "{" + text + "}";
}

std::size_t
count_phis(const Graph & graph, RegionId region, std::vector<std::size_t> & rvs)
{
  std::size_t phis = 0;
  for (auto node : graph.nodes(region))
  {
    if (graph.kind(node) == NodeKind::Phi)
    {
      phis++;
      rvs.push_back(graph.num_recursion_vars(node));
    }
    for (auto sub : graph.subregions(node))
      phis += count_phis(graph, sub, rvs);
  }
  return phis;
}

}

TEST(Restructure, ProducesStructuredControlTrees)
{
  for (const auto & module : inputs())
  {
    for (const auto & entity : module.entities)
    {
      if (entity.external)
        continue;
      auto body = prepare_body(entity);
      EXPECT_TRUE(ir::validate_cfg(module, body, ir::CfgMode::NonSsa).empty()) << entity.name;
      EXPECT_NO_THROW(structural_analysis(body)) << ir::print(entity);
    }
  }
}

TEST(Restructure, PreservesBehavior)
{
  for (const auto & name : test::corpus_names())
  {
    auto source = test::corpus_module(name);
    auto restructured = source;
    for (auto & entity : restructured.entities)
    {
      if (!entity.external)
      {
        auto body = prepare_body(entity);
        entity.blocks = body.blocks;
        entity.parameters = body.parameters;
      }
    }
    auto report = check_equivalence(source, cfg_evaluator(source), cfg_evaluator(restructured), 30, 3);
    EXPECT_TRUE(report.ok()) << name << ": " << (report.ok() ? "" : report.failures.front());
  }
}

TEST(Demand, ReadWriteSetsMatchDataflowOracle)
{
  std::size_t nodes_checked = 0;
  for (const auto & module : inputs())
  {
    for (const auto & entity : module.entities)
    {
      if (entity.external)
        continue;
      auto body = prepare_body(entity);
      auto tree = structural_analysis(body);
      annotate_demands(body, tree);
      std::string first;
      EXPECT_EQ(check_tree(body, tree, first), 0u) << first << "\n" << print_tree(body, tree);
      std::function<void(const ControlTreeNode &)> count = [&](const ControlTreeNode & node)
      {
        nodes_checked++;
        for (const auto & child : node.children)
          count(child);
      };
      count(tree);
    }
  }
  EXPECT_GT(nodes_checked, 5000u);
}

TEST(Demand, TranslationNeverMissesSymbols)
{
  for (const auto & module : inputs())
  {
    EXPECT_NO_THROW({
      auto graph = construct(module);
      EXPECT_TRUE(graph.validate().empty());
    }) << ir::print(module);
  }
}

TEST(Demand, GcdTreeSets)
{
  auto module = test::corpus_module("gcd");
  auto body = prepare_body(module.entities.front());
  auto tree = structural_analysis(body);
  annotate_demands(body, tree);

  auto label = [&](const ControlTreeNode & node)
  {
    return body.blocks[node.block].label;
  };

  ASSERT_EQ(tree.kind, TreeKind::Linear);
  EXPECT_EQ(set_text(tree.reads), "{!io,!mem,a,b}");
  EXPECT_EQ(set_text(tree.writes), "{!io,c,r.0}");
  ASSERT_EQ(tree.children.size(), 3u);

  const auto & entry = tree.children[0];
  EXPECT_EQ(entry.kind, TreeKind::Block);
  EXPECT_EQ(label(entry), "entry");
  EXPECT_TRUE(entry.reads.empty());
  EXPECT_TRUE(entry.writes.empty());

  const auto & loop = tree.children[1];
  ASSERT_EQ(loop.kind, TreeKind::Loop);
  EXPECT_EQ(set_text(loop.reads), "{!io,a,b}");
  EXPECT_EQ(set_text(loop.writes), "{!io,c,r.0}");
  EXPECT_EQ(set_text(loop.demand), "{!io,!mem,a,b}");
  ASSERT_EQ(loop.children.size(), 1u);

  const auto & inner = loop.children[0];
  ASSERT_EQ(inner.kind, TreeKind::Linear);
  EXPECT_EQ(set_text(inner.reads), "{a,b}");
  EXPECT_EQ(set_text(inner.writes), "{c,r.0}");
  ASSERT_EQ(inner.children.size(), 3u);
  EXPECT_EQ(label(inner.children[0]), "head");
  EXPECT_EQ(set_text(inner.children[0].reads), "{b}");
  EXPECT_EQ(set_text(inner.children[0].writes), "{c}");

  const auto & branch = inner.children[1];
  ASSERT_EQ(branch.kind, TreeKind::Branch);
  EXPECT_EQ(set_text(branch.reads), "{a,b}");
  EXPECT_EQ(set_text(branch.writes), "{r.0}");
  ASSERT_EQ(branch.children.size(), 2u);
  EXPECT_EQ(label(branch.children[0]), "loop.leave.0");
  EXPECT_EQ(set_text(branch.children[1].reads), "{a,b}");
  EXPECT_EQ(set_text(branch.children[1].writes), "{a,b,r.0,t}");

  const auto & tail = inner.children[2];
  EXPECT_EQ(label(tail), "loop.tail.0");
  EXPECT_EQ(set_text(tail.reads), "{r.0}");
  EXPECT_EQ(set_text(tail.demand), "{!io,!mem,a,b,r.0}");

  const auto & exit = tree.children[2];
  EXPECT_EQ(label(exit), "exit");
  EXPECT_EQ(set_text(exit.reads), "{!io,!mem,a}");
  EXPECT_EQ(set_text(exit.demand), "{!io,!mem,a}");
}

TEST(Construction, ValidGraphsThatMatchSource)
{
  std::size_t n = 0;
  for (const auto & module : inputs())
  {
    auto graph = construct(module);
    ASSERT_TRUE(graph.validate().empty()) << ir::print(module);
    auto report = check_equivalence(module, cfg_evaluator(module), rvsdg_evaluator(graph), 100, n++);
    EXPECT_TRUE(report.ok()) << ir::print(module) << (report.ok() ? "" : report.failures.front());
  }
}

TEST(Construction, RecursionEnvironments)
{
  std::vector<std::size_t> rvs;
  auto single = construct(test::corpus_module("recursive_print"));
  EXPECT_EQ(count_phis(single, single.root(), rvs), 1u);
  EXPECT_EQ(rvs, std::vector<std::size_t>{ 1 });

  rvs.clear();
  auto mutual = construct(test::corpus_module("mutual_recursion"));
  EXPECT_EQ(count_phis(mutual, mutual.root(), rvs), 1u);
  EXPECT_EQ(rvs, std::vector<std::size_t>{ 2 });

  rvs.clear();
  auto none = construct(test::corpus_module("indirect_calls"));
  EXPECT_EQ(count_phis(none, none.root(), rvs), 0u);
  EXPECT_EQ(none.num_nodes(NodeKind::Lambda), 4u);
}

TEST(Construction, ImportsAndExports)
{
  auto graph = construct(test::corpus_module("io_loop"));
  EXPECT_EQ(graph.arguments(graph.root()).size(), 2u);
  ASSERT_EQ(graph.results(graph.root()).size(), 1u);
  EXPECT_EQ(graph.name(graph.result(graph.root(), 0)), "echo");
}

TEST(Construction, NodeCountGrowsLinearly)
{
  // least-squares fit of RVSDG node count against source instruction count
  constexpr double min_r2 = 0.9;
  constexpr double max_ratio = 2.5;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0, worst = 0;
  double n = 0;
  for (std::uint64_t seed = 0; seed < test::random_corpus_size; seed++)
  {
    auto module = test::random_module(seed);
    double x = static_cast<double>(ir::instruction_count(module));
    double y = static_cast<double>(construct(module).num_nodes());
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
    n++;
    worst = std::max(worst, y / x);
  }
  auto r = (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
  EXPECT_GE(r * r, min_r2);
  EXPECT_LE(worst, max_ratio);
}

TEST(Construction, DumpIsDeterministic)
{
  for (const auto & name : test::corpus_names())
  {
    auto module = test::corpus_module(name);
    EXPECT_EQ(dump(construct(module)), dump(construct(module))) << name;
  }
}
