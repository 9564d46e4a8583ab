#include <rvsdg/error.hpp>
#include <rvsdg/ir.hpp>

#include <bit>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>

namespace rvsdg::ir
{

namespace
{

bool
is_name_char(char c)
{
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '$';
}

struct Position
{
  std::size_t line = 1;
  std::size_t column = 1;
};

class Parser
{
public:
  explicit Parser(std::string_view text)
      : text_(text)
  {}

  Module
  parse_module();

private:
  [[noreturn]] void
  fail(const std::string & message) const
  {
    throw ParseError(message, position_.line, position_.column);
  }

  [[noreturn]] static void
  fail_at(const Position & where, const std::string & message)
  {
    throw ParseError(message, where.line, where.column);
  }

  void
  skip_space()
  {
    while (offset_ < text_.size())
    {
      char c = text_[offset_];
      if (c == ';')
      {
        while (offset_ < text_.size() && text_[offset_] != '\n')
          advance();
      }
      else if (std::isspace(static_cast<unsigned char>(c)))
      {
        advance();
      }
      else
      {
        break;
      }
    }
  }

  void
  advance()
  {
    if (text_[offset_] == '\n')
    {
      position_.line++;
      position_.column = 1;
    }
    else
    {
      position_.column++;
    }
    offset_++;
  }

  bool
  at_end()
  {
    skip_space();
    return offset_ >= text_.size();
  }

  char
  peek()
  {
    skip_space();
    return offset_ < text_.size() ? text_[offset_] : '\0';
  }

  bool
  accept(std::string_view token)
  {
    skip_space();
    if (text_.substr(offset_, token.size()) != token)
      return false;
    // keywords must not run into a following name
    if (is_name_char(token.back()) && offset_ + token.size() < text_.size()
        && is_name_char(text_[offset_ + token.size()]))
      return false;
    for (std::size_t n = 0; n < token.size(); n++)
      advance();
    return true;
  }

  void
  expect(std::string_view token)
  {
    if (!accept(token))
      fail("expected '" + std::string(token) + "'");
  }

  std::string
  read_name()
  {
    skip_space();
    std::size_t start = offset_;
    while (offset_ < text_.size() && is_name_char(text_[offset_]))
      advance();
    if (start == offset_)
      fail("expected a name");
    return std::string(text_.substr(start, offset_ - start));
  }

  std::string
  read_sigil_name(char sigil)
  {
    if (peek() != sigil)
      fail(std::string("expected '") + sigil + "'");
    advance();
    if (offset_ >= text_.size() || !is_name_char(text_[offset_]))
      fail("expected a name after '" + std::string(1, sigil) + "'");
    return read_name();
  }

  std::string
  read_word()
  {
    skip_space();
    std::size_t start = offset_;
    while (offset_ < text_.size()
           && (is_name_char(text_[offset_]) || text_[offset_] == '-' || text_[offset_] == '+'))
    {
      if (text_[offset_] == '-' && offset_ + 1 < text_.size() && text_[offset_ + 1] == '>')
        break;
      advance();
    }
    if (start == offset_)
      fail("expected a literal");
    return std::string(text_.substr(start, offset_ - start));
  }

  std::uint64_t
  read_unsigned()
  {
    auto where = position_;
    auto word = read_word();
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(), value);
    if (ec != std::errc() || ptr != word.data() + word.size())
      fail_at(where, "expected an unsigned integer, got '" + word + "'");
    return value;
  }

  std::optional<Type>
  parse_return_type()
  {
    if (accept("void"))
      return std::nullopt;
    return parse_type();
  }

  Type
  parse_type()
  {
    auto where = (skip_space(), position_);
    if (accept("fn"))
    {
      expect("(");
      std::vector<Type> params;
      if (!accept(")"))
      {
        do
          params.push_back(parse_type());
        while (accept(","));
        expect(")");
      }
      expect("->");
      std::vector<Type> results;
      if (auto r = parse_return_type())
        results.push_back(*r);
      return Type::function(std::move(params), std::move(results));
    }
    auto word = read_name();
    if (word == "f64")
      return Type::float64();
    if (word == "ptr")
      return Type::pointer();
    if (word.size() > 1 && word[0] == 'i')
    {
      unsigned width = 0;
      auto [ptr, ec] = std::from_chars(word.data() + 1, word.data() + word.size(), width);
      if (ec == std::errc() && ptr == word.data() + word.size() && Type::valid_integer_width(width))
        return Type::integer(width);
    }
    fail_at(where, "unknown type '" + word + "'");
  }

  void
  use_variable(const std::string & name, const Type & type, const Position & where)
  {
    auto it = variables_.find(name);
    if (it != variables_.end())
    {
      if (it->second != type)
        fail_at(where, "%" + name + " has type " + it->second.str() + ", used as " + type.str());
      return;
    }
    pending_uses_.push_back({ name, type, where });
  }

  void
  define_variable(const std::string & name, const Type & type, const Position & where)
  {
    auto [it, inserted] = variables_.emplace(name, type);
    if (!inserted && it->second != type)
      fail_at(where, "%" + name + " redefined with type " + type.str() + ", was " + it->second.str());
  }

  Operand
  parse_operand(const Type & type)
  {
    skip_space();
    auto where = position_;
    char c = peek();
    if (c == '%')
    {
      auto name = read_sigil_name('%');
      use_variable(name, type, where);
      return Operand::variable(name, type);
    }
    if (c == '@')
    {
      auto name = read_sigil_name('@');
      pending_symbols_.push_back({ name, type, where });
      return Operand::symbol(name, type);
    }
    auto word = read_word();
    switch (type.kind())
    {
    case TypeKind::Integer:
    case TypeKind::Pointer:
    {
      if (type.kind() == TypeKind::Pointer && word == "null")
        return Operand::literal(type, 0);
      std::int64_t value = 0;
      auto [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(), value);
      if (ec == std::errc() && ptr == word.data() + word.size())
        return Operand::literal(type, static_cast<std::uint64_t>(value));
      std::uint64_t uvalue = 0;
      auto [uptr, uec] = std::from_chars(word.data(), word.data() + word.size(), uvalue);
      if (uec == std::errc() && uptr == word.data() + word.size())
        return Operand::literal(type, uvalue);
      break;
    }
    case TypeKind::Float:
    {
      if (word == "inf")
        return Operand::float_literal(std::numeric_limits<double>::infinity());
      if (word == "-inf")
        return Operand::float_literal(-std::numeric_limits<double>::infinity());
      if (word == "nan")
        return Operand::float_literal(std::numeric_limits<double>::quiet_NaN());
      double value = 0;
      auto [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(), value);
      if (ec == std::errc() && ptr == word.data() + word.size())
        return Operand::float_literal(value);
      break;
    }
    default:
      break;
    }
    fail_at(where, "invalid " + type.str() + " operand '" + word + "'");
  }

  std::size_t
  label_reference()
  {
    skip_space();
    auto where = position_;
    auto name = read_sigil_name('%');
    pending_labels_.push_back({ name, where });
    return pending_labels_.size() - 1;
  }

  Instruction
  parse_instruction(std::vector<std::size_t> & label_slots);

  Terminator
  parse_terminator(const std::optional<Type> & return_type, std::vector<std::size_t> & label_slots);

  void
  parse_body(Entity & entity, const std::optional<Type> & return_type);

  struct PendingUse
  {
    std::string name;
    Type type;
    Position where;
  };

  struct PendingLabel
  {
    std::string name;
    Position where;
  };

  std::string_view text_;
  std::size_t offset_ = 0;
  Position position_;
  std::unordered_map<std::string, Type> variables_;
  std::vector<PendingUse> pending_uses_;
  std::vector<PendingLabel> pending_labels_;
  std::vector<PendingUse> pending_symbols_;
};

const std::map<std::string_view, OpCode> binary_ops = {
  { "add", OpCode::Add }, { "sub", OpCode::Sub }, { "mul", OpCode::Mul }, { "div", OpCode::Div },
  { "rem", OpCode::Rem }, { "shl", OpCode::Shl }, { "shr", OpCode::Shr }, { "and", OpCode::And },
  { "or", OpCode::Or },   { "xor", OpCode::Xor }
};

const std::map<std::string_view, OpCode> compare_ops = { { "eq", OpCode::Eq }, { "ne", OpCode::Ne },
                                                         { "lt", OpCode::Lt }, { "le", OpCode::Le },
                                                         { "gt", OpCode::Gt }, { "ge", OpCode::Ge } };

const std::map<std::string_view, OpCode> convert_ops = { { "zext", OpCode::ZExt },
                                                         { "sext", OpCode::SExt },
                                                         { "trunc", OpCode::Trunc } };

Instruction
Parser::parse_instruction(std::vector<std::size_t> & label_slots)
{
  Instruction inst;
  skip_space();
  auto where = position_;
  std::string result;
  if (peek() == '%')
  {
    result = read_sigil_name('%');
    expect("=");
  }
  skip_space();
  auto op_where = position_;
  auto mnemonic = read_name();

  auto wrap = [&](const auto & build)
  {
    try
    {
      build();
    }
    catch (const GraphError & e)
    {
      fail_at(op_where, e.what());
    }
  };

  auto needs_result = [&]()
  {
    if (result.empty())
      fail_at(where, mnemonic + " must define a variable");
  };

  if (auto it = binary_ops.find(mnemonic); it != binary_ops.end())
  {
    needs_result();
    auto type = parse_type();
    wrap([&] { inst.op = Operation::binary(it->second, type); });
    inst.operands.push_back(parse_operand(type));
    expect(",");
    inst.operands.push_back(parse_operand(type));
    inst.type = type;
  }
  else if (auto cit = compare_ops.find(mnemonic); cit != compare_ops.end())
  {
    needs_result();
    auto type = parse_type();
    wrap([&] { inst.op = Operation::compare(cit->second, type); });
    inst.operands.push_back(parse_operand(type));
    expect(",");
    inst.operands.push_back(parse_operand(type));
    inst.type = Type::integer(1);
  }
  else if (auto vit = convert_ops.find(mnemonic); vit != convert_ops.end())
  {
    needs_result();
    auto from = parse_type();
    inst.operands.push_back(parse_operand(from));
    expect("to");
    auto to = parse_type();
    wrap([&] { inst.op = Operation::convert(vit->second, from, to); });
    inst.type = to;
  }
  else if (mnemonic == "neg")
  {
    needs_result();
    auto type = parse_type();
    wrap([&] { inst.op = Operation::neg(type); });
    inst.operands.push_back(parse_operand(type));
    inst.type = type;
  }
  else if (mnemonic == "copy")
  {
    needs_result();
    inst.kind = InstKind::Copy;
    inst.type = parse_type();
    inst.operands.push_back(parse_operand(inst.type));
  }
  else if (mnemonic == "undef")
  {
    needs_result();
    inst.type = parse_type();
    wrap([&] { inst.op = Operation::undef(inst.type); });
  }
  else if (mnemonic == "match")
  {
    needs_result();
    auto type = parse_type();
    inst.operands.push_back(parse_operand(type));
    expect("[");
    std::vector<MatchCase> cases;
    if (!accept("]"))
    {
      do
      {
        auto value_where = (skip_space(), position_);
        auto operand = parse_operand(type);
        if (operand.kind != Operand::Kind::Literal)
          fail_at(value_where, "match cases need literal values");
        expect("->");
        auto alternative = read_unsigned();
        cases.push_back({ operand.bits, static_cast<unsigned>(alternative) });
      } while (accept(","));
      expect("]");
    }
    expect("default");
    auto default_alternative = read_unsigned();
    expect("of");
    auto alternatives = read_unsigned();
    if (alternatives < 1 || alternatives > (1u << 16))
      fail_at(op_where, "match alternative count out of range");
    wrap(
        [&]
        {
          inst.op = Operation::match(
              type,
              cases,
              static_cast<unsigned>(default_alternative),
              static_cast<unsigned>(alternatives));
        });
    inst.type = Type::selector_for(static_cast<unsigned>(alternatives));
  }
  else if (mnemonic == "alloca")
  {
    needs_result();
    auto type = parse_type();
    std::uint64_t count = 1;
    if (accept(","))
      count = read_unsigned();
    wrap([&] { inst.op = Operation::alloca_op(type, count); });
    inst.type = Type::pointer();
  }
  else if (mnemonic == "load")
  {
    needs_result();
    auto type = parse_type();
    wrap([&] { inst.op = Operation::load(type); });
    inst.operands.push_back(parse_operand(Type::pointer()));
    inst.type = type;
  }
  else if (mnemonic == "store")
  {
    if (!result.empty())
      fail_at(where, "store defines no variable");
    auto type = parse_type();
    wrap([&] { inst.op = Operation::store(type); });
    inst.operands.push_back(parse_operand(type));
    expect(",");
    inst.operands.push_back(parse_operand(Type::pointer()));
    inst.type = type;
  }
  else if (mnemonic == "gep")
  {
    needs_result();
    expect("ptr");
    auto base = parse_operand(Type::pointer());
    expect(",");
    auto index_type = parse_type();
    wrap([&] { inst.op = Operation::gep(index_type); });
    inst.operands.push_back(base);
    inst.operands.push_back(parse_operand(index_type));
    inst.type = Type::pointer();
  }
  else if (mnemonic == "call")
  {
    inst.kind = InstKind::Call;
    auto return_type = parse_return_type();
    if (return_type.has_value() == result.empty())
      fail_at(where, result.empty() ? "call result must be assigned" : "void call assigns a variable");
    skip_space();
    auto callee_where = position_;
    char sigil = peek();
    if (sigil != '@' && sigil != '%')
      fail("expected a callee");
    advance();
    auto callee = read_name();
    expect("(");
    std::vector<Type> params;
    std::vector<Operand> args;
    if (!accept(")"))
    {
      do
      {
        auto t = parse_type();
        params.push_back(t);
        args.push_back(parse_operand(t));
      } while (accept(","));
      expect(")");
    }
    std::vector<Type> results;
    if (return_type)
      results.push_back(*return_type);
    auto fn_type = Type::function(std::move(params), std::move(results));
    if (sigil == '@')
    {
      pending_symbols_.push_back({ callee, fn_type, callee_where });
      inst.operands.push_back(Operand::symbol(callee, fn_type));
    }
    else
    {
      use_variable(callee, fn_type, callee_where);
      inst.operands.push_back(Operand::variable(callee, fn_type));
    }
    for (auto & a : args)
      inst.operands.push_back(std::move(a));
    inst.type = return_type.value_or(fn_type);
  }
  else if (mnemonic == "phi")
  {
    needs_result();
    inst.kind = InstKind::Phi;
    inst.type = parse_type();
    do
    {
      expect("[");
      inst.operands.push_back(parse_operand(inst.type));
      expect(",");
      inst.incoming.push_back(0);
      label_slots.push_back(label_reference());
      expect("]");
    } while (accept(","));
  }
  else
  {
    fail_at(op_where, "unknown instruction '" + mnemonic + "'");
  }

  inst.result = result;
  if (!result.empty())
    define_variable(result, inst.type, where);
  return inst;
}

Terminator
Parser::parse_terminator(
    const std::optional<Type> & return_type,
    std::vector<std::size_t> & label_slots)
{
  Terminator term;
  if (accept("br"))
  {
    term.kind = Terminator::Kind::Jump;
    expect("label");
    term.targets.push_back(0);
    label_slots.push_back(label_reference());
  }
  else if (accept("branch"))
  {
    term.kind = Terminator::Kind::Branch;
    auto type = parse_type();
    if (!type.is_integer())
      fail("branch selector must be an integer");
    term.value = parse_operand(type);
    expect(",");
    expect("[");
    do
    {
      term.targets.push_back(0);
      label_slots.push_back(label_reference());
    } while (accept(","));
    expect("]");
  }
  else if (accept("ret"))
  {
    term.kind = Terminator::Kind::Return;
    if (return_type)
      term.value = parse_operand(*return_type);
  }
  else
  {
    fail("expected an instruction or terminator");
  }
  return term;
}

void
Parser::parse_body(Entity & entity, const std::optional<Type> & return_type)
{
  expect("{");
  // label references are patched once all labels of the body are known
  struct Slot
  {
    std::size_t block;
    bool terminator;
    std::size_t instruction;
    std::size_t target;
    std::size_t label;
  };
  std::vector<Slot> slots;
  std::map<std::string, std::size_t> labels;
  std::map<std::string, Position> label_positions;

  auto is_label_start = [&]()
  {
    skip_space();
    std::size_t n = offset_;
    if (n >= text_.size() || !(std::isalpha(static_cast<unsigned char>(text_[n])) || text_[n] == '_'))
      return false;
    while (n < text_.size() && is_name_char(text_[n]))
      n++;
    while (n < text_.size() && (text_[n] == ' ' || text_[n] == '\t'))
      n++;
    return n < text_.size() && text_[n] == ':';
  };

  auto is_terminator_start = [&]()
  {
    skip_space();
    for (std::string_view word : { "br", "branch", "ret" })
    {
      if (text_.substr(offset_, word.size()) == word
          && (offset_ + word.size() >= text_.size() || !is_name_char(text_[offset_ + word.size()])))
        return true;
    }
    return false;
  };

  while (true)
  {
    if (accept("}"))
      break;
    BasicBlock block;
    skip_space();
    auto where = position_;
    if (is_label_start())
    {
      block.label = read_name();
      expect(":");
    }
    else if (!entity.blocks.empty())
    {
      fail("expected a block label");
    }
    else
    {
      block.label = "entry";
    }
    if (labels.count(block.label))
      fail_at(where, "duplicate block label '" + block.label + "'");
    labels[block.label] = entity.blocks.size();

    std::vector<std::size_t> refs;
    auto block_index = entity.blocks.size();
    while (!is_terminator_start())
    {
      if (peek() == '}' || is_label_start())
        fail("block '" + block.label + "' lacks a terminator");
      refs.clear();
      auto inst = parse_instruction(refs);
      for (std::size_t n = 0; n < refs.size(); n++)
        slots.push_back({ block_index, false, block.instructions.size(), n, refs[n] });
      block.instructions.push_back(std::move(inst));
    }
    refs.clear();
    block.terminator = parse_terminator(return_type, refs);
    for (std::size_t n = 0; n < refs.size(); n++)
      slots.push_back({ block_index, true, 0, n, refs[n] });
    entity.blocks.push_back(std::move(block));
  }
  if (entity.blocks.empty())
    fail("empty body");

  for (const auto & slot : slots)
  {
    const auto & pending = pending_labels_[slot.label];
    auto it = labels.find(pending.name);
    if (it == labels.end())
      fail_at(pending.where, "undefined label %" + pending.name);
    auto & block = entity.blocks[slot.block];
    if (slot.terminator)
      block.terminator.targets[slot.target] = it->second;
    else
      block.instructions[slot.instruction].incoming[slot.target] = it->second;
  }

  for (const auto & use : pending_uses_)
  {
    auto it = variables_.find(use.name);
    if (it == variables_.end())
      fail_at(use.where, "undefined variable %" + use.name);
    if (it->second != use.type)
      fail_at(use.where, "%" + use.name + " has type " + it->second.str() + ", used as " + use.type.str());
  }
  pending_uses_.clear();
  pending_labels_.clear();
  variables_.clear();
}

Module
Parser::parse_module()
{
  Module module;
  std::vector<Position> starts;
  while (!at_end())
  {
    skip_space();
    auto where = position_;
    Entity entity;
    if (accept("define"))
    {
      entity.kind = Entity::Kind::Function;
      entity.exported = !accept("internal");
      auto return_type = parse_return_type();
      entity.name = read_sigil_name('@');
      expect("(");
      std::vector<Type> params;
      if (!accept(")"))
      {
        do
        {
          auto t = parse_type();
          skip_space();
          auto param_where = position_;
          auto name = read_sigil_name('%');
          if (variables_.count(name))
            fail_at(param_where, "duplicate parameter %" + name);
          define_variable(name, t, param_where);
          params.push_back(t);
          entity.parameters.push_back(name);
        } while (accept(","));
        expect(")");
      }
      std::vector<Type> results;
      if (return_type)
        results.push_back(*return_type);
      entity.type = Type::function(std::move(params), std::move(results));
      parse_body(entity, return_type);
    }
    else if (accept("global"))
    {
      entity.kind = Entity::Kind::Global;
      entity.exported = !accept("internal");
      entity.type = parse_type();
      if (entity.type.is_function())
        fail_at(where, "globals cannot have function type");
      entity.name = read_sigil_name('@');
      expect("=");
      parse_body(entity, entity.type);
    }
    else if (accept("external"))
    {
      entity.external = true;
      entity.name = read_sigil_name('@');
      expect(":");
      entity.type = parse_type();
      entity.kind = entity.type.is_function() ? Entity::Kind::Function : Entity::Kind::Global;
    }
    else
    {
      fail("expected 'define', 'global' or 'external'");
    }
    if (module.find(entity.name))
      fail_at(where, "duplicate definition of @" + entity.name);
    module.entities.push_back(std::move(entity));
    starts.push_back(where);
  }

  for (const auto & use : pending_symbols_)
  {
    auto entity = module.find(use.name);
    if (!entity)
      fail_at(use.where, "undefined symbol @" + use.name);
    if (entity->type != use.type)
      fail_at(use.where, "@" + use.name + " has type " + entity->type.str() + ", used as " + use.type.str());
  }

  for (std::size_t n = 0; n < module.entities.size(); n++)
  {
    auto violations = validate_cfg(module, module.entities[n], CfgMode::NonSsa);
    if (!violations.empty())
      fail_at(starts[n], "@" + module.entities[n].name + ": " + violations.front());
  }
  return module;
}

}

Module
parse(std::string_view text)
{
  return Parser(text).parse_module();
}

}
