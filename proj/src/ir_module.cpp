#include <rvsdg/error.hpp>
#include <rvsdg/ir.hpp>

#include <algorithm>
#include <bit>
#include <charconv>
#include <functional>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace rvsdg::ir
{

Operand
Operand::variable(std::string name, Type type)
{
  Operand o;
  o.kind = Kind::Variable;
  o.type = std::move(type);
  o.name = std::move(name);
  return o;
}

Operand
Operand::literal(Type type, std::uint64_t bits)
{
  Operand o;
  o.kind = Kind::Literal;
  o.bits = type.is_integer() ? mask_to_width(bits, type.width()) : bits;
  o.type = std::move(type);
  return o;
}

Operand
Operand::float_literal(double value)
{
  return literal(Type::float64(), std::bit_cast<std::uint64_t>(value));
}

Operand
Operand::symbol(std::string name, Type type)
{
  Operand o;
  o.kind = Kind::Symbol;
  o.type = std::move(type);
  o.name = std::move(name);
  return o;
}

bool
Instruction::operator==(const Instruction & other) const
{
  return kind == other.kind && result == other.result && type == other.type && op == other.op
      && operands == other.operands && incoming == other.incoming;
}

std::optional<Type>
Entity::return_type() const
{
  if (!is_function())
    return type;
  const auto & results = type.signature().results;
  if (results.empty())
    return std::nullopt;
  return results[0];
}

const Entity *
Module::find(std::string_view name) const
{
  for (const auto & e : entities)
  {
    if (e.name == name)
      return &e;
  }
  return nullptr;
}

Entity *
Module::find(std::string_view name)
{
  for (auto & e : entities)
  {
    if (e.name == name)
      return &e;
  }
  return nullptr;
}

std::optional<std::size_t>
Module::index_of(std::string_view name) const
{
  for (std::size_t n = 0; n < entities.size(); n++)
  {
    if (entities[n].name == name)
      return n;
  }
  return std::nullopt;
}

// printing

namespace
{

std::string
print_literal(const Type & type, std::uint64_t bits)
{
  switch (type.kind())
  {
  case TypeKind::Integer:
    if (type.width() == 1)
      return std::to_string(bits);
    return std::to_string(sign_extend(bits, type.width()));
  case TypeKind::Pointer:
    return bits == 0 ? "null" : std::to_string(bits);
  case TypeKind::Float:
  {
    auto value = std::bit_cast<double>(bits);
    if (value != value)
      return "nan";
    char buffer[64];
    auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, end);
  }
  default:
    return "?";
  }
}

std::string
print_operand(const Operand & o)
{
  switch (o.kind)
  {
  case Operand::Kind::Variable:
    return "%" + o.name;
  case Operand::Kind::Symbol:
    return "@" + o.name;
  case Operand::Kind::Literal:
    return print_literal(o.type, o.bits);
  }
  return "?";
}

std::string
print_instruction(const Entity & entity, const Instruction & inst)
{
  std::string s;
  if (inst.has_result())
    s = "%" + inst.result + " = ";
  switch (inst.kind)
  {
  case InstKind::Copy:
    return s + "copy " + inst.type.str() + " " + print_operand(inst.operands[0]);
  case InstKind::Call:
  {
    const auto & callee = inst.operands[0];
    const auto & sig = callee.type.signature();
    s += "call " + print_type(sig.results.empty() ? std::nullopt : std::optional(sig.results[0]));
    s += " " + print_operand(callee) + "(";
    for (std::size_t n = 1; n < inst.operands.size(); n++)
    {
      if (n != 1)
        s += ", ";
      s += inst.operands[n].type.str() + " " + print_operand(inst.operands[n]);
    }
    return s + ")";
  }
  case InstKind::Phi:
  {
    s += "phi " + inst.type.str() + " ";
    for (std::size_t n = 0; n < inst.operands.size(); n++)
    {
      if (n != 0)
        s += ", ";
      s += "[" + print_operand(inst.operands[n]) + ", %" + entity.blocks[inst.incoming[n]].label
         + "]";
    }
    return s;
  }
  case InstKind::Op:
    break;
  }

  const auto & op = *inst.op;
  auto name = std::string(op.name());
  const auto & t = op.type();
  if (op.is_binary() || op.is_compare())
    return s + name + " " + t.str() + " " + print_operand(inst.operands[0]) + ", "
         + print_operand(inst.operands[1]);
  if (op.is_conversion())
    return s + name + " " + t.str() + " " + print_operand(inst.operands[0]) + " to "
         + op.result_type().str();
  switch (op.code())
  {
  case OpCode::Neg:
    return s + "neg " + t.str() + " " + print_operand(inst.operands[0]);
  case OpCode::Undef:
    return s + "undef " + t.str();
  case OpCode::Match:
  {
    s += "match " + t.str() + " " + print_operand(inst.operands[0]) + " [";
    for (std::size_t n = 0; n < op.cases().size(); n++)
    {
      if (n != 0)
        s += ", ";
      s += print_literal(t, op.cases()[n].value) + " -> "
         + std::to_string(op.cases()[n].alternative);
    }
    return s + "] default " + std::to_string(op.default_alternative()) + " of "
         + std::to_string(op.alternatives());
  }
  case OpCode::Alloca:
    return s + "alloca " + t.str() + ", " + std::to_string(op.count());
  case OpCode::Load:
    return s + "load " + t.str() + " " + print_operand(inst.operands[0]);
  case OpCode::Store:
    return s + "store " + t.str() + " " + print_operand(inst.operands[0]) + ", "
         + print_operand(inst.operands[1]);
  case OpCode::Gep:
    return s + "gep ptr " + print_operand(inst.operands[0]) + ", " + t.str() + " "
         + print_operand(inst.operands[1]);
  default:
    throw InvariantError("instruction cannot carry " + op.str());
  }
}

std::string
print_terminator(const Entity & entity, const Terminator & term)
{
  switch (term.kind)
  {
  case Terminator::Kind::Jump:
    return "br label %" + entity.blocks[term.targets[0]].label;
  case Terminator::Kind::Branch:
  {
    std::string s =
        "branch " + term.value->type.str() + " " + print_operand(*term.value) + ", [";
    for (std::size_t n = 0; n < term.targets.size(); n++)
    {
      if (n != 0)
        s += ", ";
      s += "%" + entity.blocks[term.targets[n]].label;
    }
    return s + "]";
  }
  case Terminator::Kind::Return:
    return term.value ? "ret " + print_operand(*term.value) : "ret";
  }
  return "?";
}

}

std::string
print_type(const std::optional<Type> & type)
{
  return type ? type->str() : "void";
}

std::string
print(const Entity & entity)
{
  if (entity.external)
    return "external @" + entity.name + " : " + entity.type.str() + "\n";
  std::string s;
  if (entity.is_function())
  {
    s = "define ";
    if (!entity.exported)
      s += "internal ";
    s += print_type(entity.return_type()) + " @" + entity.name + "(";
    const auto & params = entity.type.signature().parameters;
    for (std::size_t n = 0; n < params.size(); n++)
    {
      if (n != 0)
        s += ", ";
      s += params[n].str() + " %" + entity.parameters[n];
    }
    s += ") {\n";
  }
  else
  {
    s = "global ";
    if (!entity.exported)
      s += "internal ";
    s += entity.type.str() + " @" + entity.name + " = {\n";
  }
  for (const auto & block : entity.blocks)
  {
    s += block.label + ":\n";
    for (const auto & inst : block.instructions)
      s += "  " + print_instruction(entity, inst) + "\n";
    s += "  " + print_terminator(entity, block.terminator) + "\n";
  }
  return s + "}\n";
}

std::string
print(const Module & module)
{
  std::string s;
  for (std::size_t n = 0; n < module.entities.size(); n++)
  {
    if (n != 0)
      s += "\n";
    s += print(module.entities[n]);
  }
  return s;
}

// inter-procedure graph

std::vector<std::size_t>
Ipg::successors(std::size_t node) const
{
  std::vector<std::size_t> result;
  for (const auto & [from, to] : edges)
  {
    if (from == node)
      result.push_back(to);
  }
  return result;
}

Ipg
compute_ipg(const Module & module)
{
  Ipg ipg;
  std::set<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t n = 0; n < module.entities.size(); n++)
  {
    ipg.nodes.push_back(n);
    auto note = [&](const Operand & o)
    {
      if (o.kind == Operand::Kind::Symbol)
      {
        if (auto target = module.index_of(o.name))
          edges.emplace(n, *target);
      }
    };
    for (const auto & block : module.entities[n].blocks)
    {
      for (const auto & inst : block.instructions)
      {
        for (const auto & o : inst.operands)
          note(o);
      }
      if (block.terminator.value)
        note(*block.terminator.value);
    }
  }
  ipg.edges.assign(edges.begin(), edges.end());
  return ipg;
}

std::vector<std::vector<std::size_t>>
ipg_components(const Ipg & ipg)
{
  auto count = ipg.nodes.size();
  std::vector<std::vector<std::size_t>> adjacency(count);
  for (const auto & [from, to] : ipg.edges)
    adjacency[from].push_back(to);

  std::vector<std::vector<std::size_t>> components;
  std::vector<std::optional<std::size_t>> index(count);
  std::vector<std::size_t> low(count, 0);
  std::vector<bool> on_stack(count, false);
  std::vector<std::size_t> stack;
  std::size_t next_index = 0;

  std::function<void(std::size_t)> connect = [&](std::size_t v)
  {
    index[v] = low[v] = next_index++;
    stack.push_back(v);
    on_stack[v] = true;
    for (auto w : adjacency[v])
    {
      if (!index[w])
      {
        connect(w);
        low[v] = std::min(low[v], low[w]);
      }
      else if (on_stack[w])
      {
        low[v] = std::min(low[v], *index[w]);
      }
    }
    if (low[v] == *index[v])
    {
      std::vector<std::size_t> component;
      std::size_t w = 0;
      do
      {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        component.push_back(w);
      } while (w != v);
      std::sort(component.begin(), component.end());
      components.push_back(std::move(component));
    }
  };

  for (std::size_t v = 0; v < count; v++)
  {
    if (!index[v])
      connect(v);
  }
  return components;
}

// CFG helpers

std::vector<std::size_t>
successors(const BasicBlock & block)
{
  return block.terminator.targets;
}

std::vector<std::vector<std::size_t>>
predecessors(const Entity & entity)
{
  std::vector<std::vector<std::size_t>> preds(entity.blocks.size());
  for (std::size_t n = 0; n < entity.blocks.size(); n++)
  {
    for (auto target : entity.blocks[n].terminator.targets)
    {
      if (target < preds.size()
          && std::find(preds[target].begin(), preds[target].end(), n) == preds[target].end())
        preds[target].push_back(n);
    }
  }
  return preds;
}

std::vector<std::string>
reads(const Instruction & inst)
{
  std::vector<std::string> names;
  for (const auto & o : inst.operands)
  {
    if (o.is_variable())
      names.push_back(o.name);
  }
  return names;
}

std::vector<std::string>
reads(const Terminator & term)
{
  if (term.value && term.value->is_variable())
    return { term.value->name };
  return {};
}

std::vector<std::pair<std::string, Type>>
variable_types(const Entity & entity)
{
  std::vector<std::pair<std::string, Type>> types;
  std::unordered_set<std::string> seen;
  auto note = [&](const std::string & name, const Type & type)
  {
    if (seen.insert(name).second)
      types.emplace_back(name, type);
  };
  if (entity.is_function())
  {
    for (std::size_t n = 0; n < entity.parameters.size(); n++)
      note(entity.parameters[n], entity.type.signature().parameters[n]);
  }
  for (const auto & block : entity.blocks)
  {
    for (const auto & inst : block.instructions)
    {
      if (inst.has_result())
        note(inst.result, inst.type);
      for (const auto & o : inst.operands)
      {
        if (o.is_variable())
          note(o.name, o.type);
      }
    }
    if (block.terminator.value && block.terminator.value->is_variable())
      note(block.terminator.value->name, block.terminator.value->type);
  }
  return types;
}

namespace
{

std::vector<std::size_t>
reverse_postorder(const Entity & entity)
{
  std::vector<std::size_t> order;
  if (entity.blocks.empty())
    return order;
  std::vector<bool> visited(entity.blocks.size(), false);
  // iterative DFS keeping successor positions
  std::vector<std::pair<std::size_t, std::size_t>> stack{ { 0, 0 } };
  visited[0] = true;
  while (!stack.empty())
  {
    auto & [block, next] = stack.back();
    const auto & targets = entity.blocks[block].terminator.targets;
    if (next < targets.size())
    {
      auto target = targets[next++];
      if (!visited[target])
      {
        visited[target] = true;
        stack.emplace_back(target, 0);
      }
    }
    else
    {
      order.push_back(block);
      stack.pop_back();
    }
  }
  std::reverse(order.begin(), order.end());
  return order;
}

}

std::vector<std::optional<std::size_t>>
immediate_dominators(const Entity & entity)
{
  auto count = entity.blocks.size();
  std::vector<std::optional<std::size_t>> idom(count);
  if (count == 0)
    return idom;
  auto order = reverse_postorder(entity);
  std::vector<std::size_t> position(count, 0);
  for (std::size_t n = 0; n < order.size(); n++)
    position[order[n]] = n;
  auto preds = predecessors(entity);

  idom[0] = 0;
  auto intersect = [&](std::size_t a, std::size_t b)
  {
    while (a != b)
    {
      while (position[a] > position[b])
        a = *idom[a];
      while (position[b] > position[a])
        b = *idom[b];
    }
    return a;
  };

  bool changed = true;
  while (changed)
  {
    changed = false;
    for (std::size_t n = 1; n < order.size(); n++)
    {
      auto b = order[n];
      std::optional<std::size_t> candidate;
      for (auto p : preds[b])
      {
        if (!idom[p])
          continue;
        candidate = candidate ? intersect(*candidate, p) : p;
      }
      if (candidate && idom[b] != candidate)
      {
        idom[b] = candidate;
        changed = true;
      }
    }
  }
  return idom;
}

namespace
{

bool
dominates(const std::vector<std::optional<std::size_t>> & idom, std::size_t a, std::size_t b)
{
  while (true)
  {
    if (a == b)
      return true;
    if (!idom[b] || *idom[b] == b)
      return false;
    b = *idom[b];
  }
}

}

namespace
{

bool
has_cycle(const Entity & entity)
{
  // 0 unvisited, 1 on stack, 2 done
  std::vector<int> state(entity.blocks.size(), 0);
  std::function<bool(std::size_t)> visit = [&](std::size_t b)
  {
    state[b] = 1;
    for (auto s : successors(entity.blocks[b]))
    {
      if (state[s] == 1 || (state[s] == 0 && visit(s)))
        return true;
    }
    state[b] = 2;
    return false;
  };
  return visit(0);
}

std::vector<const Entity *>
referenced_globals(const Module & module, const Entity & entity)
{
  std::vector<const Entity *> globals;
  auto note = [&](const Operand & o)
  {
    if (o.kind != Operand::Kind::Symbol)
      return;
    auto target = module.find(o.name);
    if (target && !target->is_function())
      globals.push_back(target);
  };
  for (const auto & block : entity.blocks)
  {
    for (const auto & inst : block.instructions)
    {
      for (const auto & o : inst.operands)
        note(o);
    }
    if (block.terminator.value)
      note(*block.terminator.value);
  }
  return globals;
}

bool
reaches_itself(const Module & module, const Entity & global)
{
  std::set<const Entity *> seen;
  std::vector<const Entity *> work = referenced_globals(module, global);
  while (!work.empty())
  {
    auto current = work.back();
    work.pop_back();
    if (current == &global)
      return true;
    if (!seen.insert(current).second)
      continue;
    for (auto next : referenced_globals(module, *current))
      work.push_back(next);
  }
  return false;
}

}

std::vector<std::string>
validate_cfg(const Module & module, const Entity & entity, CfgMode mode)
{
  std::vector<std::string> violations;
  auto report = [&](std::string message)
  {
    violations.push_back(std::move(message));
  };

  if (entity.external)
  {
    if (!entity.blocks.empty())
      report("external entity has a body");
    return violations;
  }
  if (entity.blocks.empty())
  {
    report("missing body");
    return violations;
  }

  auto count = entity.blocks.size();
  auto return_type = entity.return_type();
  bool is_global = !entity.is_function();

  std::unordered_map<std::string, Type> types;
  std::unordered_map<std::string, std::size_t> definitions;
  if (entity.is_function())
  {
    for (std::size_t n = 0; n < entity.parameters.size(); n++)
    {
      types.emplace(entity.parameters[n], entity.type.signature().parameters[n]);
      definitions[entity.parameters[n]]++;
    }
  }
  for (const auto & block : entity.blocks)
  {
    for (const auto & inst : block.instructions)
    {
      if (!inst.has_result())
        continue;
      definitions[inst.result]++;
      auto [it, inserted] = types.emplace(inst.result, inst.type);
      if (!inserted && it->second != inst.type)
        report("%" + inst.result + " defined with types " + it->second.str() + " and "
               + inst.type.str());
    }
  }

  auto check_operand = [&](const Operand & o, const std::string & where)
  {
    if (o.kind == Operand::Kind::Variable)
    {
      auto it = types.find(o.name);
      if (it == types.end())
        report(where + ": undefined variable %" + o.name);
      else if (it->second != o.type)
        report(where + ": %" + o.name + " used as " + o.type.str() + " but has type "
               + it->second.str());
    }
    else if (o.kind == Operand::Kind::Symbol)
    {
      auto target = module.find(o.name);
      if (!target)
        report(where + ": undefined symbol @" + o.name);
      else if (target->type != o.type)
        report(where + ": @" + o.name + " used as " + o.type.str());
    }
  };

  auto preds = predecessors(entity);
  if (!preds[0].empty())
    report("entry block '" + entity.blocks[0].label + "' has predecessors");

  std::set<std::string> labels;
  for (std::size_t b = 0; b < count; b++)
  {
    const auto & block = entity.blocks[b];
    auto where = "block '" + block.label + "'";
    if (!labels.insert(block.label).second)
      report(where + ": duplicate label");
    bool in_head = true;
    for (const auto & inst : block.instructions)
    {
      if (inst.kind == InstKind::Phi)
      {
        if (!in_head)
          report(where + ": phi after a non-phi instruction");
        std::vector<std::size_t> incoming = inst.incoming;
        std::sort(incoming.begin(), incoming.end());
        auto sorted_preds = preds[b];
        std::sort(sorted_preds.begin(), sorted_preds.end());
        if (incoming != sorted_preds)
          report(where + ": phi %" + inst.result + " does not list each predecessor once");
      }
      else
      {
        in_head = false;
      }
      if (is_global && inst.is_stateful())
        report(where + ": global initializer has side effects");
      if (is_global && inst.op && inst.op->may_trap())
        report(where + ": global initializer may trap");
      if (inst.kind == InstKind::Call)
      {
        if (!inst.operands[0].type.is_function())
          report(where + ": callee is not a function");
      }
      for (const auto & o : inst.operands)
        check_operand(o, where);
    }

    const auto & term = block.terminator;
    for (auto target : term.targets)
    {
      if (target >= count)
        report(where + ": branch target out of range");
    }
    switch (term.kind)
    {
    case Terminator::Kind::Jump:
      if (term.targets.size() != 1)
        report(where + ": jump needs exactly one target");
      break;
    case Terminator::Kind::Branch:
      if (term.targets.empty() || !term.value || !term.value->type.is_integer())
        report(where + ": malformed branch");
      break;
    case Terminator::Kind::Return:
      if (!term.targets.empty())
        report(where + ": return with targets");
      if (term.value.has_value() != return_type.has_value()
          || (term.value && term.value->type != *return_type))
        report(where + ": return value does not match " + print_type(return_type));
      break;
    }
    if (term.value)
      check_operand(*term.value, where);
  }

  if (is_global && violations.empty())
  {
    if (has_cycle(entity))
      report("global initializer contains a loop");
    if (reaches_itself(module, entity))
      report("cyclic global initializer");
  }

  if (mode == CfgMode::Ssa && violations.empty())
  {
    for (const auto & [name, n] : definitions)
    {
      if (n > 1)
        report("%" + name + " assigned " + std::to_string(n) + " times");
    }

    auto idom = immediate_dominators(entity);
    std::unordered_map<std::string, std::pair<std::size_t, std::size_t>> def_site;
    if (entity.is_function())
    {
      for (const auto & p : entity.parameters)
        def_site[p] = { 0, 0 };
    }
    for (std::size_t b = 0; b < count; b++)
    {
      for (std::size_t i = 0; i < entity.blocks[b].instructions.size(); i++)
      {
        const auto & inst = entity.blocks[b].instructions[i];
        if (inst.has_result())
          def_site[inst.result] = { b, i + 1 };
      }
    }
    auto available = [&](const std::string & name, std::size_t block, std::size_t position)
    {
      auto [def_block, def_position] = def_site.at(name);
      if (def_block == block)
        return def_position <= position;
      return dominates(idom, def_block, block);
    };
    for (std::size_t b = 0; b < count; b++)
    {
      if (!idom[b])
        continue;
      const auto & block = entity.blocks[b];
      for (std::size_t i = 0; i < block.instructions.size(); i++)
      {
        const auto & inst = block.instructions[i];
        for (std::size_t n = 0; n < inst.operands.size(); n++)
        {
          const auto & o = inst.operands[n];
          if (!o.is_variable())
            continue;
          bool ok = inst.kind == InstKind::Phi
                      ? (!idom[inst.incoming[n]]
                         || available(
                             o.name,
                             inst.incoming[n],
                             entity.blocks[inst.incoming[n]].instructions.size()))
                      : available(o.name, b, i);
          if (!ok)
            report("use of %" + o.name + " in block '" + block.label
                   + "' is not dominated by its definition");
        }
      }
      for (const auto & name : reads(block.terminator))
      {
        if (!available(name, b, block.instructions.size()))
          report("use of %" + name + " in the terminator of '" + block.label
                 + "' is not dominated by its definition");
      }
    }
  }
  return violations;
}

std::vector<std::string>
validate_module(const Module & module, CfgMode mode)
{
  std::vector<std::string> violations;
  std::set<std::string> names;
  for (const auto & entity : module.entities)
  {
    if (!names.insert(entity.name).second)
      violations.push_back("duplicate entity @" + entity.name);
    for (auto & v : validate_cfg(module, entity, mode))
      violations.push_back("@" + entity.name + ": " + v);
  }
  return violations;
}

bool
is_single_assignment(const Entity & entity)
{
  std::unordered_set<std::string> defined(entity.parameters.begin(), entity.parameters.end());
  for (const auto & block : entity.blocks)
  {
    for (const auto & inst : block.instructions)
    {
      if (inst.has_result() && !defined.insert(inst.result).second)
        return false;
    }
  }
  return true;
}

namespace
{

class NameSource
{
public:
  explicit NameSource(const Entity & entity)
  {
    for (const auto & [name, type] : variable_types(entity))
      used_.insert(name);
  }

  std::string
  fresh(const std::string & base)
  {
    for (std::size_t n = 1;; n++)
    {
      auto candidate = base + "." + std::to_string(n);
      if (used_.insert(candidate).second)
        return candidate;
    }
  }

  bool
  claim(const std::string & name)
  {
    return used_.insert(name).second;
  }

private:
  std::unordered_set<std::string> used_;
};

}

void
destruct_ssa(Entity & entity)
{
  NameSource names(entity);
  for (auto & block : entity.blocks)
  {
    std::vector<Instruction> head;
    std::size_t phis = 0;
    while (phis < block.instructions.size() && block.instructions[phis].kind == InstKind::Phi)
      phis++;
    if (phis == 0)
      continue;

    std::vector<std::pair<std::size_t, Instruction>> pred_copies;
    for (std::size_t n = 0; n < phis; n++)
    {
      const auto & phi = block.instructions[n];
      auto temp = names.fresh(phi.result);
      for (std::size_t k = 0; k < phi.operands.size(); k++)
      {
        Instruction copy;
        copy.kind = InstKind::Copy;
        copy.result = temp;
        copy.type = phi.type;
        copy.operands.push_back(phi.operands[k]);
        pred_copies.emplace_back(phi.incoming[k], std::move(copy));
      }
      Instruction assign;
      assign.kind = InstKind::Copy;
      assign.result = phi.result;
      assign.type = phi.type;
      assign.operands.push_back(Operand::variable(temp, phi.type));
      head.push_back(std::move(assign));
    }
    block.instructions.erase(block.instructions.begin(), block.instructions.begin() + static_cast<std::ptrdiff_t>(phis));
    block.instructions.insert(block.instructions.begin(), head.begin(), head.end());
    for (auto & [pred, copy] : pred_copies)
      entity.blocks[pred].instructions.push_back(std::move(copy));
  }
}

void
remove_unreachable_blocks(Entity & entity)
{
  auto count = entity.blocks.size();
  if (count == 0)
    return;
  std::vector<bool> reachable(count, false);
  std::vector<std::size_t> work{ 0 };
  reachable[0] = true;
  while (!work.empty())
  {
    auto b = work.back();
    work.pop_back();
    for (auto t : entity.blocks[b].terminator.targets)
    {
      if (!reachable[t])
      {
        reachable[t] = true;
        work.push_back(t);
      }
    }
  }
  std::vector<std::size_t> renumber(count, 0);
  std::vector<BasicBlock> kept;
  for (std::size_t b = 0; b < count; b++)
  {
    if (reachable[b])
    {
      renumber[b] = kept.size();
      kept.push_back(std::move(entity.blocks[b]));
    }
  }
  if (kept.size() == count)
  {
    entity.blocks = std::move(kept);
    return;
  }
  std::vector<bool> reachable_new;
  for (auto & block : kept)
  {
    for (auto & t : block.terminator.targets)
      t = renumber[t];
    for (auto & inst : block.instructions)
    {
      if (inst.kind != InstKind::Phi)
        continue;
      std::vector<Operand> operands;
      std::vector<std::size_t> incoming;
      for (std::size_t n = 0; n < inst.incoming.size(); n++)
      {
        if (reachable[inst.incoming[n]])
        {
          operands.push_back(inst.operands[n]);
          incoming.push_back(renumber[inst.incoming[n]]);
        }
      }
      inst.operands = std::move(operands);
      inst.incoming = std::move(incoming);
    }
  }
  entity.blocks = std::move(kept);
}

void
construct_ssa(Entity & entity)
{
  if (entity.external || entity.blocks.empty())
    return;
  for (const auto & block : entity.blocks)
  {
    if (!block.instructions.empty() && block.instructions.front().kind == InstKind::Phi)
    {
      destruct_ssa(entity);
      break;
    }
  }
  remove_unreachable_blocks(entity);
  auto count = entity.blocks.size();
  auto idom = immediate_dominators(entity);
  auto preds = predecessors(entity);

  // dominance frontiers
  std::vector<std::set<std::size_t>> frontier(count);
  for (std::size_t b = 0; b < count; b++)
  {
    if (preds[b].size() < 2)
      continue;
    for (auto p : preds[b])
    {
      auto runner = p;
      while (runner != *idom[b])
      {
        frontier[runner].insert(b);
        runner = *idom[runner];
      }
    }
  }

  auto all_types = variable_types(entity);
  std::map<std::string, Type> types(all_types.begin(), all_types.end());

  // liveness, for pruned phi placement
  std::vector<std::set<std::string>> use(count), def(count), live_in(count);
  for (std::size_t b = 0; b < count; b++)
  {
    for (const auto & inst : entity.blocks[b].instructions)
    {
      for (const auto & name : reads(inst))
      {
        if (!def[b].count(name))
          use[b].insert(name);
      }
      if (inst.has_result())
        def[b].insert(inst.result);
    }
    for (const auto & name : reads(entity.blocks[b].terminator))
    {
      if (!def[b].count(name))
        use[b].insert(name);
    }
  }
  bool changed = true;
  while (changed)
  {
    changed = false;
    for (std::size_t b = count; b-- > 0;)
    {
      std::set<std::string> in = use[b];
      for (auto s : entity.blocks[b].terminator.targets)
      {
        for (const auto & name : live_in[s])
        {
          if (!def[b].count(name))
            in.insert(name);
        }
      }
      if (in != live_in[b])
      {
        live_in[b] = std::move(in);
        changed = true;
      }
    }
  }

  // phi placement
  std::map<std::string, std::set<std::size_t>> def_blocks;
  for (const auto & p : entity.parameters)
    def_blocks[p].insert(0);
  for (std::size_t b = 0; b < count; b++)
  {
    for (const auto & name : def[b])
      def_blocks[name].insert(b);
  }
  std::vector<std::vector<std::string>> phi_vars(count);
  for (const auto & [name, blocks] : def_blocks)
  {
    std::set<std::size_t> placed;
    std::vector<std::size_t> work(blocks.begin(), blocks.end());
    while (!work.empty())
    {
      auto b = work.back();
      work.pop_back();
      for (auto f : frontier[b])
      {
        if (placed.count(f) || !live_in[f].count(name))
          continue;
        placed.insert(f);
        phi_vars[f].push_back(name);
        if (!blocks.count(f))
          work.push_back(f);
      }
    }
  }
  for (std::size_t b = 0; b < count; b++)
  {
    std::vector<Instruction> phis;
    for (const auto & name : phi_vars[b])
    {
      Instruction phi;
      phi.kind = InstKind::Phi;
      phi.result = name;
      phi.type = types.at(name);
      for (auto p : preds[b])
      {
        phi.operands.push_back(Operand::variable(name, phi.type));
        phi.incoming.push_back(p);
      }
      phis.push_back(std::move(phi));
    }
    entity.blocks[b].instructions.insert(
        entity.blocks[b].instructions.begin(),
        phis.begin(),
        phis.end());
  }

  // renaming over the dominator tree
  std::vector<std::vector<std::size_t>> children(count);
  for (std::size_t b = 1; b < count; b++)
    children[*idom[b]].push_back(b);

  NameSource names(entity);
  std::map<std::string, std::vector<std::string>> stacks;
  std::map<std::string, std::string> undef_names;
  std::vector<Instruction> undefs;
  std::set<std::string> first_use;
  for (const auto & p : entity.parameters)
  {
    stacks[p].push_back(p);
    first_use.insert(p);
  }

  auto current = [&](const std::string & name) -> std::string
  {
    auto & stack = stacks[name];
    if (!stack.empty())
      return stack.back();
    auto it = undef_names.find(name);
    if (it != undef_names.end())
      return it->second;
    auto fresh = names.fresh(name + ".undef");
    Instruction u;
    u.kind = InstKind::Op;
    u.result = fresh;
    u.type = types.at(name);
    u.op = Operation::undef(u.type);
    undefs.push_back(std::move(u));
    undef_names[name] = fresh;
    return fresh;
  };

  auto rename_def = [&](std::string & name)
  {
    auto original = name;
    if (first_use.insert(original).second)
      stacks[original].push_back(original);
    else
    {
      name = names.fresh(original);
      stacks[original].push_back(name);
    }
    return original;
  };

  std::function<void(std::size_t)> rename = [&](std::size_t b)
  {
    std::vector<std::string> pushed;
    auto & block = entity.blocks[b];
    for (auto & inst : block.instructions)
    {
      if (inst.kind != InstKind::Phi)
      {
        for (auto & o : inst.operands)
        {
          if (o.is_variable())
            o.name = current(o.name);
        }
      }
      if (inst.has_result())
        pushed.push_back(rename_def(inst.result));
    }
    if (block.terminator.value && block.terminator.value->is_variable())
      block.terminator.value->name = current(block.terminator.value->name);

    auto targets = block.terminator.targets;
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    for (auto s : targets)
    {
      for (auto & inst : entity.blocks[s].instructions)
      {
        if (inst.kind != InstKind::Phi)
          break;
        for (std::size_t n = 0; n < inst.incoming.size(); n++)
        {
          if (inst.incoming[n] == b)
            inst.operands[n].name = current(inst.operands[n].name);
        }
      }
    }
    for (auto child : children[b])
      rename(child);
    for (const auto & original : pushed)
      stacks[original].pop_back();
  };

  rename(0);

  auto & entry = entity.blocks[0].instructions;
  entry.insert(entry.begin(), undefs.begin(), undefs.end());
}

std::size_t
instruction_count(const Module & module)
{
  std::size_t count = 0;
  for (const auto & entity : module.entities)
  {
    for (const auto & block : entity.blocks)
      count += block.instructions.size() + 1;
  }
  return count;
}

}
