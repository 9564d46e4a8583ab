#include <rvsdg/construction.hpp>
#include <rvsdg/destruction.hpp>
#include <rvsdg/dump.hpp>
#include <rvsdg/oracle.hpp>
#include <rvsdg/passes.hpp>

#include <corpus.hpp>
#include <generator.hpp>

#include <gtest/gtest.h>

#include <algorithm>

using namespace rvsdg;

namespace
{

std::vector<std::pair<std::string, ir::Module>>
all_inputs()
{
  std::vector<std::pair<std::string, ir::Module>> modules;
  for (const auto & name : test::corpus_names())
    modules.emplace_back(name, test::corpus_module(name));
  for (std::uint64_t seed = 0; seed < test::random_corpus_size; seed++)
    modules.emplace_back("random " + std::to_string(seed), test::random_module(seed));
  return modules;
}

const std::vector<std::pair<std::string, ir::Module>> &
inputs()
{
  static const auto modules = all_inputs();
  return modules;
}

const ir::Entity &
recovered(const ir::Module & module, const std::string & name)
{
  const auto * entity = module.find(name);
  if (!entity)
    throw std::runtime_error("no entity @" + name);
  return *entity;
}

std::size_t
branch_count(const ir::Entity & entity, std::size_t targets)
{
  return std::count_if(
      entity.blocks.begin(),
      entity.blocks.end(),
      [&](const ir::BasicBlock & block)
      {
        return block.terminator.kind == ir::Terminator::Kind::Branch
            && block.terminator.targets.size() == targets;
      });
}

bool
has_back_edge(const ir::Entity & entity)
{
  for (std::size_t b = 0; b < entity.blocks.size(); b++)
  {
    for (auto s : ir::successors(entity.blocks[b]))
    {
      if (s <= b)
        return true;
    }
  }
  return false;
}

}

TEST(Roundtrip, CorpusAndRandomProgramsAreEquivalent)
{
  std::size_t conclusive = 0;
  for (const auto & [name, module] : inputs())
  {
    auto output = destruct(construct(module));
    auto violations = ir::validate_module(output, ir::CfgMode::Ssa);
    ASSERT_TRUE(violations.empty()) << name << ": " << violations.front();
    auto report = check_equivalence(module, cfg_evaluator(module), cfg_evaluator(output), 100, 29);
    EXPECT_GE(report.comparisons, 100u);
    EXPECT_TRUE(report.ok()) << name << ": " << (report.ok() ? "" : report.failures.front()) << "\n"
                             << ir::print(module) << "\n"
                             << ir::print(output);
    conclusive += report.conclusive;
  }
  EXPECT_GT(conclusive, 100u * inputs().size() / 2);
}

TEST(Roundtrip, OptimizedProgramsAreEquivalent)
{
  for (const auto & [name, module] : inputs())
  {
    auto graph = construct(module);
    run_pipeline(graph);
    auto output = destruct(graph);
    ASSERT_TRUE(ir::validate_module(output, ir::CfgMode::Ssa).empty()) << name;
    auto report = check_equivalence(module, cfg_evaluator(module), cfg_evaluator(output), 30, 31);
    EXPECT_TRUE(report.ok()) << name << ": " << (report.ok() ? "" : report.failures.front());
  }
}

TEST(Roundtrip, NoUnreachableBlocks)
{
  for (const auto & name : test::corpus_names())
  {
    auto graph = construct(test::corpus_module(name));
    dne(graph);
    auto output = destruct(graph);
    for (const auto & entity : output.entities)
    {
      if (entity.external)
        continue;
      auto copy = entity;
      ir::remove_unreachable_blocks(copy);
      EXPECT_EQ(copy.blocks.size(), entity.blocks.size()) << name << " @" << entity.name;
    }
  }
}

TEST(Scfr, StraightLineFunctionIsOneBlock)
{
  auto module = ir::parse(
      "define i64 @f(i64 %a, i64 %b) {\n"
      "  %x = mul i64 %a, %b\n"
      "  %y = add i64 %x, %a\n"
      "  ret %y\n"
      "}\n");
  auto output = inter_pcfr(construct(module));
  const auto & f = recovered(output, "f");
  ASSERT_EQ(f.blocks.size(), 1u);
  EXPECT_EQ(f.blocks[0].terminator.kind, ir::Terminator::Kind::Return);
  EXPECT_EQ(f.parameters.size(), 2u);
}

TEST(Scfr, SwitchBecomesThreeWayBranchAndJoin)
{
  auto output = inter_pcfr(construct(test::corpus_module("switch3")));
  const auto & sel = recovered(output, "sel");
  EXPECT_EQ(branch_count(sel, 3), 1u);
  EXPECT_FALSE(has_back_edge(sel));
  // split, three alternatives and the join
  EXPECT_EQ(sel.blocks.size(), 5u);
  auto preds = ir::predecessors(sel);
  EXPECT_EQ(std::count_if(preds.begin(), preds.end(), [](const auto & p) { return p.size() == 3; }), 1);
}

TEST(Scfr, LoopBecomesTailControlledBackEdge)
{
  auto output = inter_pcfr(construct(test::corpus_module("do_while")));
  for (const auto & entity : output.entities)
  {
    if (entity.external)
      continue;
    EXPECT_TRUE(has_back_edge(entity)) << entity.name;
    // the back edge leaves from a two-way branch
    bool found = false;
    for (std::size_t b = 0; b < entity.blocks.size(); b++)
    {
      const auto & term = entity.blocks[b].terminator;
      if (term.kind == ir::Terminator::Kind::Branch && term.targets.size() == 2 && term.targets[1] <= b)
        found = true;
    }
    EXPECT_TRUE(found) << ir::print(entity);
  }
}

TEST(InterPcfr, IndirectCallsReferenceGraph)
{
  auto output = destruct(construct(test::corpus_module("indirect_calls")));
  auto ipg = ir::compute_ipg(output);
  EXPECT_EQ(ipg.nodes.size(), 4u);
  EXPECT_EQ(ipg.edges.size(), 3u);
  auto tot = *output.index_of("tot");
  EXPECT_EQ(ipg.successors(tot).size(), 3u);
  EXPECT_TRUE(recovered(output, "tot").exported);
  EXPECT_FALSE(recovered(output, "sum").exported);
}

TEST(InterPcfr, ImportsBecomeExternals)
{
  auto module = ir::parse("external @print : fn(i64) -> void\nexternal @input : fn() -> i64\n");
  auto output = destruct(construct(module));
  ASSERT_EQ(output.entities.size(), 2u);
  for (const auto & entity : output.entities)
  {
    EXPECT_TRUE(entity.external);
    EXPECT_TRUE(entity.blocks.empty());
  }
  EXPECT_NE(output.find("print"), nullptr);
  EXPECT_NE(output.find("input"), nullptr);
}

TEST(InterPcfr, SelfRecursiveFunction)
{
  auto output = destruct(construct(test::corpus_module("recursive_print")));
  const auto & f = recovered(output, "f");
  EXPECT_TRUE(f.exported);
  auto ipg = ir::compute_ipg(output);
  auto index = *output.index_of("f");
  auto succ = ipg.successors(index);
  EXPECT_NE(std::find(succ.begin(), succ.end(), index), succ.end());
  auto components = ir::ipg_components(ipg);
  EXPECT_EQ(components.size(), 2u);
}

TEST(InterPcfr, GlobalsKeepTheirInitializers)
{
  auto module = test::corpus_module("global_table");
  auto output = destruct(construct(module));
  for (const auto & entity : module.entities)
  {
    const auto * found = output.find(entity.name);
    ASSERT_NE(found, nullptr) << entity.name;
    EXPECT_EQ(found->kind, entity.kind);
    EXPECT_EQ(found->type, entity.type);
  }
}

TEST(Destruction, IsDeterministic)
{
  for (const auto & name : test::corpus_names())
  {
    auto module = test::corpus_module(name);
    EXPECT_EQ(ir::print(destruct(construct(module))), ir::print(destruct(construct(module)))) << name;
  }
}
