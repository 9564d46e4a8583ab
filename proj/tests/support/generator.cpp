#include "generator.hpp"

#include <random>

namespace rvsdg::test
{

namespace
{

constexpr unsigned pool_size = 4;

class Generator
{
public:
  Generator(std::uint64_t seed, const GeneratorConfig & config)
      : rng_(seed),
        config_(config)
  {}

  std::string
  run()
  {
    out_ += "external @print : fn(i64) -> void\n\n";
    out_ += "global internal i64 @g = {\n  ret " + std::to_string(pick(0, 99)) + "\n}\n\n";
    out_ += "define internal i64 @h(i64 %x) {\n";
    out_ += "  %y = mul i64 %x, " + std::to_string(pick(2, 9)) + "\n";
    out_ += "  %y = xor i64 %y, " + std::to_string(pick(0, 255)) + "\n";
    out_ += "  ret %y\n}\n\n";

    blocks_ = pick(1, config_.max_blocks);
    out_ += "define i64 @f(i64 %p0, i64 %p1) {\nentry:\n";
    line("%v0 = copy i64 %p0");
    line("%v1 = copy i64 %p1");
    line("%v2 = copy i64 @g");
    line("%v3 = copy i64 " + std::to_string(pick(0, 9)));
    line("%budget = copy i64 " + std::to_string(pick(1, config_.max_budget)));
    line("%mem = alloca i64, 8");
    line("br label %b0");
    for (unsigned b = 0; b < blocks_; b++)
      block(b);
    out_ += "exit:\n";
    line("%r = load i64 %mem");
    line("%r = add i64 %r, %v0");
    line("%s = mul i64 %v1, 31");
    line("%r = xor i64 %r, %s");
    line("%r = sub i64 %r, %v" + std::to_string(pick(2, pool_size - 1)));
    line("ret %r");
    out_ += "}\n";
    return std::move(out_);
  }

private:
  unsigned
  pick(unsigned lo, unsigned hi)
  {
    return std::uniform_int_distribution<unsigned>(lo, hi)(rng_);
  }

  std::string
  var()
  {
    return "%v" + std::to_string(pick(0, pool_size - 1));
  }

  std::string
  operand()
  {
    return pick(0, 3) == 0 ? std::to_string(pick(0, 20)) : var();
  }

  std::string
  temp()
  {
    return "%t" + std::to_string(temps_++);
  }

  void
  line(const std::string & text)
  {
    out_ += "  " + text + "\n";
  }

  std::string
  address()
  {
    auto index = temp();
    auto pointer = temp();
    line(index + " = and i64 " + var() + ", 7");
    line(pointer + " = gep ptr %mem, i64 " + index);
    return pointer;
  }

  void
  instruction()
  {
    static const char * binary[] = { "add", "sub", "mul", "and", "or", "xor" };
    static const char * compare[] = { "eq", "ne", "lt", "le", "gt", "ge" };
    auto target = var();
    switch (pick(0, 11))
    {
    case 0:
    case 1:
    case 2:
      line(target + " = " + binary[pick(0, 5)] + " i64 " + var() + ", " + operand());
      break;
    case 3:
    {
      auto amount = temp();
      line(amount + " = and i64 " + var() + ", 7");
      line(target + " = " + (pick(0, 1) ? "shl" : "shr") + " i64 " + var() + ", " + amount);
      break;
    }
    case 4:
    {
      auto flag = temp();
      line(flag + " = " + compare[pick(0, 5)] + " i64 " + var() + ", " + operand());
      line(target + " = zext i1 " + flag + " to i64");
      break;
    }
    case 5:
    {
      auto divisor = temp();
      line(divisor + " = or i64 " + var() + ", 1");
      line(target + " = " + (pick(0, 1) ? "div" : "rem") + " i64 " + var() + ", " + divisor);
      break;
    }
    case 6:
    {
      auto pointer = address();
      line("store i64 " + var() + ", " + pointer);
      break;
    }
    case 7:
    {
      auto pointer = address();
      line(target + " = load i64 " + pointer);
      break;
    }
    case 8:
      line(target + " = call i64 @h(i64 " + var() + ")");
      break;
    case 9:
      line("call void @print(i64 " + var() + ")");
      break;
    case 10:
    {
      auto narrow = temp();
      auto sum = temp();
      line(narrow + " = trunc i64 " + var() + " to i8");
      line(sum + " = add i8 " + narrow + ", " + std::to_string(pick(1, 200)));
      line(target + " = " + (pick(0, 1) ? "sext" : "zext") + " i8 " + sum + " to i64");
      break;
    }
    default:
      line(target + " = copy i64 " + operand());
      break;
    }
  }

  std::string
  label(unsigned block)
  {
    return block < blocks_ ? "%b" + std::to_string(block) : "%exit";
  }

  void
  block(unsigned b)
  {
    out_ += "b" + std::to_string(b) + ":\n";
    line("%budget = sub i64 %budget, 1");
    auto count = pick(0, config_.max_instructions);
    for (unsigned n = 0; n < count; n++)
      instruction();

    if (pick(0, 3) == 0)
    {
      line("br label " + label(pick(b + 1, blocks_)));
      return;
    }
    auto targets = pick(2, 3);
    auto live = temp();
    auto gate = temp();
    auto bits = temp();
    auto selector = temp();
    line(live + " = gt i64 %budget, 0");
    line(gate + " = zext i1 " + live + " to i64");
    line(bits + " = and i64 " + var() + ", " + (targets == 2 ? "1" : "3"));
    line(bits + " = mul i64 " + bits + ", " + gate);
    std::string list = "%exit";
    for (unsigned t = 1; t < targets; t++)
      list += ", " + label(pick(0, blocks_));
    if (targets == 2)
    {
      line(selector + " = trunc i64 " + bits + " to i1");
      line("branch i1 " + selector + ", [" + list + "]");
    }
    else
    {
      line(selector + " = trunc i64 " + bits + " to i8");
      line("branch i8 " + selector + ", [" + list + "]");
    }
  }

  std::mt19937_64 rng_;
  GeneratorConfig config_;
  std::string out_;
  unsigned blocks_ = 0;
  unsigned temps_ = 0;
};

}

std::string
random_module_text(std::uint64_t seed, const GeneratorConfig & config)
{
  return Generator(seed, config).run();
}

ir::Module
random_module(std::uint64_t seed, const GeneratorConfig & config)
{
  auto module = ir::parse(random_module_text(seed, config));
  for (auto & entity : module.entities)
  {
    if (entity.external)
      continue;
    ir::remove_unreachable_blocks(entity);
    if (seed % 2 == 1)
      ir::construct_ssa(entity);
  }
  return module;
}

}
