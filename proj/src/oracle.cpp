#include <rvsdg/interp.hpp>
#include <rvsdg/oracle.hpp>

#include <memory>

namespace rvsdg
{

std::vector<Value>
random_arguments(const FunctionSignature & signature, std::mt19937_64 & rng)
{
  std::vector<Value> values;
  for (const auto & type : signature.parameters)
  {
    switch (type.kind())
    {
    case TypeKind::Integer:
    {
      std::uint64_t bits = rng();
      switch (rng() % 4)
      {
      case 0:
        bits %= 8;
        break;
      case 1:
        bits = static_cast<std::uint64_t>(static_cast<std::int64_t>(bits % 201) - 100);
        break;
      case 2:
        bits %= 100'000;
        break;
      default:
        break;
      }
      values.push_back(Value::integer(type.width(), bits));
      break;
    }
    case TypeKind::Float:
      values.push_back(Value::float64(static_cast<double>(static_cast<std::int64_t>(rng() % 2001) - 1000) / 8.0));
      break;
    default:
      values.push_back(Value::zero(type));
      break;
    }
  }
  return values;
}

Evaluator
cfg_evaluator(const ir::Module & module)
{
  auto interpreter = std::make_shared<CfgInterpreter>(module);
  return [interpreter](std::string_view name, std::span<const Value> args, std::uint64_t fuel)
  {
    return interpreter->run(name, args, fuel);
  };
}

Evaluator
rvsdg_evaluator(const Graph & graph)
{
  auto interpreter = std::make_shared<RvsdgInterpreter>(graph);
  return [interpreter](std::string_view name, std::span<const Value> args, std::uint64_t fuel)
  {
    return interpreter->run(name, args, fuel);
  };
}

EquivalenceReport
check_equivalence(
    const ir::Module & module,
    const Evaluator & source,
    const Evaluator & target,
    std::size_t samples,
    std::uint64_t seed,
    std::uint64_t fuel)
{
  EquivalenceReport report;
  std::mt19937_64 rng(seed);
  for (const auto & entity : module.entities)
  {
    if (entity.external || !entity.exported || !entity.is_function())
      continue;
    for (std::size_t n = 0; n < samples; n++)
    {
      auto args = random_arguments(entity.type.signature(), rng);
      auto expected = source(entity.name, args, fuel);
      auto actual = target(entity.name, args, fuel * target_fuel_factor);
      report.comparisons++;
      if (expected.ok())
        report.conclusive++;
      if (auto difference = compare_behavior(expected, actual))
      {
        std::string call = "@" + entity.name + "(";
        for (std::size_t i = 0; i < args.size(); i++)
          call += (i ? ", " : "") + args[i].str();
        report.failures.push_back(call + "): " + *difference);
      }
    }
  }
  return report;
}

}
