#include <rvsdg/error.hpp>
#include <rvsdg/interp.hpp>
#include <rvsdg/ir.hpp>
#include <rvsdg/oracle.hpp>

#include <corpus.hpp>

#include <gtest/gtest.h>

#include <algorithm>

using namespace rvsdg;

namespace
{

std::size_t
count_phis(const ir::BasicBlock & block)
{
  return std::count_if(
      block.instructions.begin(),
      block.instructions.end(),
      [](const ir::Instruction & inst) { return inst.kind == ir::InstKind::Phi; });
}

void
expect_parse_error(const std::string & text)
{
  EXPECT_THROW(ir::parse(text), ParseError) << text;
}

}

TEST(Parser, CorpusRoundtripsThroughPrinter)
{
  auto names = test::corpus_names();
  ASSERT_GE(names.size(), 25u);
  for (const auto & name : names)
  {
    auto module = test::corpus_module(name);
    auto text = ir::print(module);
    EXPECT_EQ(ir::parse(text), module) << name;
    EXPECT_EQ(ir::print(ir::parse(text)), text) << name;
    EXPECT_TRUE(ir::validate_module(module, ir::CfgMode::NonSsa).empty()) << name;
  }
}

TEST(Parser, RejectsMalformedInput)
{
  expect_parse_error("define i64 @f(i64 %a) {\n  ret %b\n}\n");
  expect_parse_error("define i64 @f(i64 %a) {\n  %x = frob i64 %a, 1\n  ret %x\n}\n");
  expect_parse_error("define i64 @f(i64 %a) {\n  br label %nowhere\n}\n");
  expect_parse_error("define i64 @f(i64 %a) {\n  %x = add i64 %a\n  ret %x\n}\n");
  expect_parse_error("define i64 @f(i64 %a) {\n  %x = add i64 %a, 1\n");
  expect_parse_error("define i64 @f(i64 %a) {\n  ret %a\n}\ndefine i64 @f(i64 %a) {\n  ret %a\n}\n");
}

TEST(Parser, ErrorCarriesPosition)
{
  try
  {
    ir::parse("define i64 @f(i64 %a) {\n  %x = frob i64 %a, 1\n  ret %x\n}\n");
    FAIL() << "accepted unknown operation";
  }
  catch (const ParseError & e)
  {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Validation, SsaModeRejectsDoubleDefinition)
{
  auto module = test::corpus_module("gcd");
  EXPECT_FALSE(ir::validate_module(module, ir::CfgMode::Ssa).empty());
  EXPECT_FALSE(ir::is_single_assignment(module.entities.front()));
}

TEST(Ssa, CounterLoopGetsPhisAtHeadOnly)
{
  auto module = test::corpus_module("counted_loop");
  auto & entity = module.entities.front();
  ir::construct_ssa(entity);
  EXPECT_TRUE(ir::validate_module(module, ir::CfgMode::Ssa).empty());
  EXPECT_TRUE(ir::is_single_assignment(entity));
  // i and s are redefined in the body and merge at the head
  for (std::size_t b = 0; b < entity.blocks.size(); b++)
  {
    auto expected = entity.blocks[b].label == "head" ? 2u : 0u;
    EXPECT_EQ(count_phis(entity.blocks[b]), expected) << entity.blocks[b].label;
  }
}

TEST(Ssa, ConstructionAndDestructionPreserveBehavior)
{
  for (const auto & name : test::corpus_names())
  {
    auto source = test::corpus_module(name);
    auto ssa = source;
    for (auto & entity : ssa.entities)
    {
      if (!entity.external)
        ir::construct_ssa(entity);
    }
    ASSERT_TRUE(ir::validate_module(ssa, ir::CfgMode::Ssa).empty()) << name;
    auto back = ssa;
    for (auto & entity : back.entities)
    {
      if (!entity.external)
        ir::destruct_ssa(entity);
    }
    ASSERT_TRUE(ir::validate_module(back, ir::CfgMode::NonSsa).empty()) << name;
    for (const auto * target : { &ssa, &back })
    {
      auto report = check_equivalence(source, cfg_evaluator(source), cfg_evaluator(*target), 20, 7);
      EXPECT_TRUE(report.ok()) << name << ": " << (report.ok() ? "" : report.failures.front());
    }
  }
}

TEST(Ssa, DominatorsOfDiamond)
{
  auto module = test::corpus_module("switch3");
  const auto & entity = module.entities.front();
  auto idom = ir::immediate_dominators(entity);
  ASSERT_EQ(idom.size(), 5u);
  for (std::size_t b = 0; b < idom.size(); b++)
    EXPECT_EQ(idom[b], std::optional<std::size_t>(0)) << entity.blocks[b].label;
}

TEST(Ipg, IndirectCallsReferenceGraph)
{
  auto module = test::corpus_module("indirect_calls");
  auto ipg = ir::compute_ipg(module);
  EXPECT_EQ(ipg.nodes.size(), 4u);
  auto tot = *module.index_of("tot");
  auto sum = *module.index_of("sum");
  auto succ = ipg.successors(tot);
  std::sort(succ.begin(), succ.end());
  std::vector<std::size_t> expected{ *module.index_of("f"), *module.index_of("g"), sum };
  std::sort(expected.begin(), expected.end());
  EXPECT_EQ(succ, expected);
  EXPECT_TRUE(ipg.successors(sum).empty());
  EXPECT_EQ(ipg.edges.size(), 3u);
}

TEST(Ipg, MutualRecursionFormsOneComponent)
{
  auto module = test::corpus_module("mutual_recursion");
  auto components = ir::ipg_components(ir::compute_ipg(module));
  auto even = *module.index_of("even");
  auto odd = *module.index_of("odd");
  bool found = false;
  for (auto component : components)
  {
    std::sort(component.begin(), component.end());
    if (std::find(component.begin(), component.end(), even) != component.end())
    {
      EXPECT_EQ(component, (std::vector<std::size_t>{ std::min(even, odd), std::max(even, odd) }));
      found = true;
    }
    else
      EXPECT_EQ(component.size(), 1u);
  }
  EXPECT_TRUE(found);
  EXPECT_EQ(components.size(), 2u);
}

TEST(Cfg, RemoveUnreachableBlocksKeepsEntry)
{
  auto module = ir::parse(
      "define i64 @f(i64 %a) {\n"
      "entry:\n  br label %exit\n"
      "dead:\n  br label %exit\n"
      "exit:\n  ret %a\n"
      "}\n");
  auto & entity = module.entities.front();
  ir::remove_unreachable_blocks(entity);
  ASSERT_EQ(entity.blocks.size(), 2u);
  EXPECT_EQ(entity.blocks.front().label, "entry");
  EXPECT_EQ(entity.blocks.back().label, "exit");
  EXPECT_EQ(entity.blocks.front().terminator.targets, std::vector<std::size_t>{ 1 });
}

TEST(Cfg, InstructionCountIncludesTerminators)
{
  auto module = test::corpus_module("loads_states");
  EXPECT_EQ(ir::instruction_count(module), 8u);
}
