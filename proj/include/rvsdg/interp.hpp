#ifndef RVSDG_INTERP_HPP
#define RVSDG_INTERP_HPP

#include <rvsdg/graph.hpp>
#include <rvsdg/ir.hpp>
#include <rvsdg/machine.hpp>

#include <memory>
#include <span>
#include <string_view>

namespace rvsdg
{

/**
 * Evaluator over source CFGs. Compiles bodies to slot-addressed form on first use, so one instance
 * should be reused across many runs of the same module. The module must outlive the interpreter.
 */
class CfgInterpreter
{
public:
  explicit CfgInterpreter(const ir::Module & module);

  ~CfgInterpreter();

  CfgInterpreter(const CfgInterpreter &) = delete;

  CfgInterpreter &
  operator=(const CfgInterpreter &) = delete;

  /// Runs a function, or evaluates a global's initializer when \p name denotes a global.
  EvalResult
  run(std::string_view name, std::span<const Value> arguments, std::uint64_t fuel = default_fuel);

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/**
 * Evaluator over RVSDGs. Every region is evaluated in topological node order; γ-nodes evaluate only
 * the selected subregion and θ-nodes re-evaluate their body while the predicate is 1. The graph
 * must outlive the interpreter.
 */
class RvsdgInterpreter
{
public:
  explicit RvsdgInterpreter(const Graph & graph);

  ~RvsdgInterpreter();

  RvsdgInterpreter(const RvsdgInterpreter &) = delete;

  RvsdgInterpreter &
  operator=(const RvsdgInterpreter &) = delete;

  /// Runs an exported function, or returns the value of an exported global.
  EvalResult
  run(std::string_view name, std::span<const Value> arguments, std::uint64_t fuel = default_fuel);

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

EvalResult
eval_cfg(
    const ir::Module & module,
    std::string_view name,
    std::span<const Value> arguments,
    std::uint64_t fuel = default_fuel);

EvalResult
eval_rvsdg(
    const Graph & graph,
    std::string_view name,
    std::span<const Value> arguments,
    std::uint64_t fuel = default_fuel);

}

#endif
