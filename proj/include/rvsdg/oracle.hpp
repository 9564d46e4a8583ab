#ifndef RVSDG_ORACLE_HPP
#define RVSDG_ORACLE_HPP

#include <rvsdg/graph.hpp>
#include <rvsdg/ir.hpp>
#include <rvsdg/machine.hpp>

#include <functional>
#include <random>
#include <string>
#include <vector>

namespace rvsdg
{

/**
 * Random argument values. Integers are drawn from small magnitudes most of the time and from the
 * full width otherwise; pointers and functions get null values.
 */
std::vector<Value>
random_arguments(const FunctionSignature & signature, std::mt19937_64 & rng);

/// Runs an entity of one program representation by name.
using Evaluator = std::function<EvalResult(std::string_view, std::span<const Value>, std::uint64_t)>;

Evaluator
cfg_evaluator(const ir::Module & module);

Evaluator
rvsdg_evaluator(const Graph & graph);

struct EquivalenceReport
{
  std::size_t comparisons = 0;
  /// Comparisons whose source run completed without trap or fuel exhaustion.
  std::size_t conclusive = 0;
  std::vector<std::string> failures;

  [[nodiscard]] bool
  ok() const noexcept
  {
    return failures.empty();
  }
};

inline constexpr std::uint64_t target_fuel_factor = 100;

/**
 * Runs every exported, defined function of \p module on \p samples random argument vectors under
 * both evaluators and checks that \p target refines \p source. The target runs with
 * target_fuel_factor times the source fuel.
 */
EquivalenceReport
check_equivalence(
    const ir::Module & module,
    const Evaluator & source,
    const Evaluator & target,
    std::size_t samples,
    std::uint64_t seed,
    std::uint64_t fuel = 100'000);

}

#endif
