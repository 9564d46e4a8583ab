#include <rvsdg/construction.hpp>
#include <rvsdg/destruction.hpp>
#include <rvsdg/dump.hpp>
#include <rvsdg/error.hpp>
#include <rvsdg/interp.hpp>
#include <rvsdg/oracle.hpp>
#include <rvsdg/passes.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace
{

using namespace rvsdg;

constexpr int exit_invalid = 1;
constexpr int exit_mismatch = 2;
constexpr int exit_invariant = 3;

struct Options
{
  std::string file;
  std::optional<std::string> passes;
  unsigned unroll_factor = 4;
  std::string function;
  std::string arguments;
  std::uint64_t fuel = default_fuel;
  std::string level = "rvsdg";
  std::size_t samples = 100;
  std::uint64_t seed = 0;
};

ir::Module
load(const std::string & path)
{
  std::ifstream in(path);
  if (!in)
    throw Error("cannot read " + path);
  std::stringstream text;
  text << in.rdbuf();
  return ir::parse(text.str());
}

PassConfig
no_passes()
{
  PassConfig config;
  config.passes.clear();
  return config;
}

PassConfig
pass_config(const Options & options, bool default_to_pipeline)
{
  PassConfig config;
  if (options.passes)
    config.passes = parse_pass_list(*options.passes);
  else if (!default_to_pipeline)
    config.passes.clear();
  config.unroll_factor = options.unroll_factor;
  return config;
}

Graph
optimized(const ir::Module & module, const PassConfig & config)
{
  auto graph = construct(module);
  auto violations = graph.validate();
  if (!violations.empty())
    throw InvariantError("graph invalid after construction: " + violations.front());
  run_pipeline(graph, config);
  return graph;
}

int
cmd_check(const Options & options)
{
  auto module = load(options.file);
  std::size_t blocks = 0;
  for (const auto & entity : module.entities)
    blocks += entity.blocks.size();
  std::cout << "entities=" << module.entities.size() << "\n";
  std::cout << "blocks=" << blocks << "\n";
  std::cout << "instructions=" << ir::instruction_count(module) << "\n";
  auto ssa = ir::validate_module(module, ir::CfgMode::Ssa).empty();
  std::cout << "ssa=" << (ssa ? "yes" : "no") << "\n";
  std::cout << "valid=yes\n";
  return 0;
}

int
cmd_construct(const Options & options)
{
  auto graph = optimized(load(options.file), no_passes());
  std::cout << dump(graph);
  return 0;
}

int
cmd_opt(const Options & options)
{
  auto graph = optimized(load(options.file), pass_config(options, true));
  std::cout << dump(graph);
  return 0;
}

int
cmd_destruct(const Options & options)
{
  auto graph = optimized(load(options.file), pass_config(options, false));
  auto module = destruct(graph);
  auto violations = ir::validate_module(module, ir::CfgMode::Ssa);
  if (!violations.empty())
    throw InvariantError("destructed module invalid: " + violations.front());
  std::cout << ir::print(module);
  return 0;
}

int
cmd_run(const Options & options)
{
  auto module = load(options.file);
  const auto * entity = module.find(options.function);
  if (!entity || entity->external)
    throw Error("no defined entity @" + options.function);

  std::vector<Value> arguments;
  if (entity->is_function())
  {
    const auto & params = entity->type.signature().parameters;
    std::vector<std::string> words;
    std::stringstream list(options.arguments);
    for (std::string word; std::getline(list, word, ',');)
    {
      if (!word.empty())
        words.push_back(word);
    }
    if (words.size() != params.size())
      throw Error(
          "@" + options.function + " takes " + std::to_string(params.size()) + " arguments, got "
          + std::to_string(words.size()));
    for (std::size_t n = 0; n < params.size(); n++)
      arguments.push_back(parse_value(params[n], words[n]));
  }

  EvalResult result;
  if (options.level == "cfg")
    result = eval_cfg(module, options.function, arguments, options.fuel);
  else if (options.level == "rvsdg")
  {
    auto graph = optimized(module, pass_config(options, false));
    result = eval_rvsdg(graph, options.function, arguments, options.fuel);
  }
  else
    throw Error("run level must be cfg or rvsdg");
  std::cout << result.str();
  return 0;
}

int
cmd_dot(const Options & options)
{
  auto module = load(options.file);
  if (options.level == "rvsdg")
    std::cout << to_dot(optimized(module, pass_config(options, false)));
  else if (options.level == "cfg")
    std::cout << cfg_to_dot(module);
  else if (options.level == "tree")
    std::cout << tree_to_dot(module);
  else
    throw Error("dot level must be rvsdg, cfg or tree");
  return 0;
}

void
print_stats(const std::string & prefix, const Graph & graph)
{
  for (const auto & [key, value] : graph_stats(graph))
    std::cout << prefix << key << "=" << value << "\n";
}

int
cmd_stats(const Options & options)
{
  auto module = load(options.file);
  std::size_t blocks = 0;
  for (const auto & entity : module.entities)
    blocks += entity.blocks.size();
  std::cout << "source.entities=" << module.entities.size() << "\n";
  std::cout << "source.blocks=" << blocks << "\n";
  std::cout << "source.instructions=" << ir::instruction_count(module) << "\n";

  auto graph = optimized(module, no_passes());
  print_stats("rvsdg.", graph);
  auto config = pass_config(options, false);
  if (!config.passes.empty())
  {
    auto pipeline = run_pipeline(graph, config);
    print_stats("opt.", graph);
    std::cout << pipeline.str();
  }
  std::cout << "destructed.instructions=" << ir::instruction_count(destruct(graph)) << "\n";
  return 0;
}

int
cmd_roundtrip(const Options & options)
{
  auto module = load(options.file);
  auto graph = optimized(module, pass_config(options, false));
  auto output = destruct(graph);
  auto violations = ir::validate_module(output, ir::CfgMode::Ssa);
  if (!violations.empty())
    throw InvariantError("destructed module invalid: " + violations.front());

  auto source = cfg_evaluator(module);
  auto to_rvsdg =
      check_equivalence(module, source, rvsdg_evaluator(graph), options.samples, options.seed, options.fuel);
  auto to_cfg =
      check_equivalence(module, source, cfg_evaluator(output), options.samples, options.seed, options.fuel);
  std::cout << "comparisons=" << to_cfg.comparisons << "\n";
  std::cout << "conclusive=" << to_cfg.conclusive << "\n";
  std::cout << "rvsdg.failures=" << to_rvsdg.failures.size() << "\n";
  std::cout << "roundtrip.failures=" << to_cfg.failures.size() << "\n";
  for (const auto & failure : to_rvsdg.failures)
    std::cout << "rvsdg: " << failure << "\n";
  for (const auto & failure : to_cfg.failures)
    std::cout << "roundtrip: " << failure << "\n";
  return to_rvsdg.ok() && to_cfg.ok() ? 0 : exit_mismatch;
}

}

int
main(int argc, char ** argv)
{
  CLI::App app{ "RVSDG construction, optimization and destruction for a small SSA IR" };
  app.require_subcommand(1);
  Options options;

  auto add = [&](const char * name, const char * description) {
    auto * sub = app.add_subcommand(name, description);
    sub->add_option("file", options.file, "Input module")->required();
    return sub;
  };
  auto add_passes = [&](CLI::App * sub) {
    sub->add_option("--passes", options.passes, "Comma-separated pass list");
    sub->add_option("--unroll-factor", options.unroll_factor, "Loop unrolling factor")
        ->check(CLI::PositiveNumber);
  };

  auto * check = add("check", "Parse and validate a module");
  auto * construct_cmd = add("construct", "Print the constructed RVSDG");
  auto * opt = add("opt", "Print the RVSDG after the optimization pipeline");
  add_passes(opt);
  auto * destruct_cmd = add("destruct", "Print the module recovered from the RVSDG");
  add_passes(destruct_cmd);
  auto * run = add("run", "Evaluate a function");
  run->add_option("--fn", options.function, "Function or global name")->required();
  run->add_option("--args", options.arguments, "Comma-separated argument literals");
  run->add_option("--fuel", options.fuel, "Operation budget");
  run->add_option("--level", options.level, "cfg or rvsdg")->capture_default_str();
  add_passes(run);
  auto * dot = add("dot", "Print a Graphviz rendering");
  dot->add_option("--level", options.level, "rvsdg, cfg or tree")->capture_default_str();
  add_passes(dot);
  auto * stats = add("stats", "Print size metrics as key=value lines");
  add_passes(stats);
  auto * roundtrip = add("roundtrip", "Check source, RVSDG and recovered module for equivalence");
  roundtrip->add_option("--samples", options.samples, "Random inputs per function");
  roundtrip->add_option("--seed", options.seed, "Random seed");
  roundtrip->add_option("--fuel", options.fuel, "Operation budget of the source runs");
  add_passes(roundtrip);

  CLI11_PARSE(app, argc, argv);

  try
  {
    if (check->parsed())
      return cmd_check(options);
    if (construct_cmd->parsed())
      return cmd_construct(options);
    if (opt->parsed())
      return cmd_opt(options);
    if (destruct_cmd->parsed())
      return cmd_destruct(options);
    if (run->parsed())
      return cmd_run(options);
    if (dot->parsed())
      return cmd_dot(options);
    if (stats->parsed())
      return cmd_stats(options);
    if (roundtrip->parsed())
      return cmd_roundtrip(options);
  }
  catch (const InvariantError & e)
  {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return exit_invariant;
  }
  catch (const GraphError & e)
  {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return exit_invariant;
  }
  catch (const Error & e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return exit_invalid;
  }
  return 0;
}
