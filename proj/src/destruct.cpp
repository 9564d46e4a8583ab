#include <rvsdg/destruction.hpp>
#include <rvsdg/error.hpp>

#include <set>

namespace rvsdg
{

namespace
{

Type
variable_type(const Type & type)
{
  return type.is_control() ? Type::selector_for(type.alternatives()) : type;
}

class Lowering
{
public:
  Lowering(const Graph & graph, const std::unordered_map<OriginId, std::string> & symbols)
      : graph_(graph),
        symbols_(symbols)
  {}

  ir::Entity
  run(NodeId node)
  {
    auto region = graph_.subregion(node);
    for (std::size_t n = 0; n < graph_.num_context_vars(node); n++)
    {
      auto cv = graph_.context_var(node, n);
      auto it = symbols_.find(graph_.origin(cv.input));
      if (it == symbols_.end())
        throw InvariantError("context variable of " + graph_.name(node) + " is not bound to an entity");
      env_[cv.argument] = ir::Operand::symbol(it->second, graph_.type(cv.argument));
    }

    if (graph_.kind(node) == NodeKind::Lambda)
    {
      entity_.kind = ir::Entity::Kind::Function;
      entity_.type = graph_.type(graph_.output(node, 0));
      const auto & signature = graph_.lambda_signature(node);
      for (std::size_t n = 0; n < signature.parameters.size(); n++)
      {
        auto name = "p" + std::to_string(n);
        entity_.parameters.push_back(name);
        env_[graph_.lambda_parameter(node, n)] = ir::Operand::variable(name, signature.parameters[n]);
      }
    }
    else if (graph_.kind(node) == NodeKind::Delta)
    {
      entity_.kind = ir::Entity::Kind::Global;
      entity_.type = graph_.type(graph_.output(node, 0));
    }
    else
      throw InvariantError("only λ- and δ-nodes have bodies");

    entity_.exported = false;
    current_ = new_block("entry");
    lower(region);

    auto & term = entity_.blocks[current_].terminator;
    term.kind = ir::Terminator::Kind::Return;
    if (!graph_.results(region).empty() && graph_.type(graph_.result(region, 0)).is_value())
      term.value = lookup(graph_.origin(graph_.result(region, 0)));
    return std::move(entity_);
  }

private:
  std::size_t
  new_block(std::string label = {})
  {
    if (label.empty())
      label = "b" + std::to_string(entity_.blocks.size());
    ir::BasicBlock block;
    block.label = std::move(label);
    entity_.blocks.push_back(std::move(block));
    return entity_.blocks.size() - 1;
  }

  ir::Operand
  fresh(const Type & type)
  {
    return ir::Operand::variable("v" + std::to_string(next_variable_++), variable_type(type));
  }

  const ir::Operand &
  lookup(OriginId origin) const
  {
    auto it = env_.find(origin);
    if (it == env_.end())
      throw InvariantError("origin without a variable during control flow recovery");
    return it->second;
  }

  void
  emit(ir::Instruction inst)
  {
    entity_.blocks[current_].instructions.push_back(std::move(inst));
  }

  void
  copy(const ir::Operand & target, const ir::Operand & source)
  {
    ir::Instruction inst;
    inst.kind = ir::InstKind::Copy;
    inst.result = target.name;
    inst.type = target.type;
    inst.operands.push_back(source);
    emit(std::move(inst));
  }

  void
  jump(std::size_t from, std::size_t to)
  {
    auto & term = entity_.blocks[from].terminator;
    term.kind = ir::Terminator::Kind::Jump;
    term.targets = { to };
  }

  void
  lower(RegionId region)
  {
    for (auto node : graph_.topological_order(region))
    {
      switch (graph_.kind(node))
      {
      case NodeKind::Simple:
        lower_simple(node);
        break;
      case NodeKind::Gamma:
        lower_gamma(node);
        break;
      case NodeKind::Theta:
        lower_theta(node);
        break;
      default:
        throw InvariantError("unexpected " + graph_.label(node) + " node inside a body");
      }
    }
  }

  ir::Instruction
  op_instruction(const Operation & op, const Type & type, std::vector<ir::Operand> operands)
  {
    ir::Instruction inst;
    inst.op = op;
    inst.type = type;
    inst.operands = std::move(operands);
    return inst;
  }

  void
  define(OriginId origin, ir::Instruction inst)
  {
    auto result = fresh(graph_.type(origin));
    inst.result = result.name;
    emit(std::move(inst));
    env_[origin] = result;
  }

  void
  lower_simple(NodeId node)
  {
    const auto & op = graph_.operation(node);
    std::vector<ir::Operand> values;
    for (auto input : graph_.inputs(node))
    {
      if (graph_.type(input).is_value())
        values.push_back(lookup(graph_.origin(input)));
    }
    auto out = graph_.outputs(node).empty() ? OriginId() : graph_.output(node, 0);

    switch (op.code())
    {
    case OpCode::Constant:
    {
      const auto & type = graph_.type(out);
      if (type.kind() == TypeKind::Float)
        env_[out] = ir::Operand::float_literal(op.float_value());
      else
        env_[out] = ir::Operand::literal(variable_type(type), op.int_value());
      return;
    }
    case OpCode::Match:
      define(out, op_instruction(op, variable_type(graph_.type(out)), std::move(values)));
      return;
    case OpCode::CtlToInt:
    {
      const auto & from = values[0].type;
      const auto & to = op.result_type();
      if (from == to)
      {
        env_[out] = values[0];
        return;
      }
      auto code = from.width() < to.width() ? OpCode::ZExt : OpCode::Trunc;
      define(out, op_instruction(Operation::convert(code, from, to), to, std::move(values)));
      return;
    }
    case OpCode::Store:
    {
      auto inst = op_instruction(op, op.type(), { values[1], values[0] });
      emit(std::move(inst));
      return;
    }
    case OpCode::Load:
      define(out, op_instruction(op, op.type(), std::move(values)));
      return;
    case OpCode::Apply:
    {
      const auto & signature = op.signature();
      ir::Instruction inst;
      inst.kind = ir::InstKind::Call;
      inst.type = signature.results.empty() ? values[0].type : signature.results[0];
      inst.operands = std::move(values);
      if (signature.results.empty())
        emit(std::move(inst));
      else
        define(out, std::move(inst));
      return;
    }
    default:
      define(out, op_instruction(op, graph_.type(out), std::move(values)));
      return;
    }
  }

  void
  lower_gamma(NodeId gamma)
  {
    auto predicate = lookup(graph_.origin(graph_.input(gamma, 0)));
    const auto & subregions = graph_.subregions(gamma);
    for (std::size_t n = 0; n < graph_.num_entry_vars(gamma); n++)
    {
      auto ev = graph_.entry_var(gamma, n);
      if (!graph_.type(ev.input).is_value())
        continue;
      auto value = lookup(graph_.origin(ev.input));
      for (auto argument : ev.arguments)
        env_[argument] = value;
    }
    std::vector<std::optional<ir::Operand>> exits;
    for (auto output : graph_.outputs(gamma))
    {
      if (graph_.type(output).is_value())
        exits.push_back(fresh(graph_.type(output)));
      else
        exits.emplace_back();
    }

    auto split = current_;
    std::vector<std::size_t> targets;
    std::vector<std::size_t> ends;
    for (std::size_t r = 0; r < subregions.size(); r++)
    {
      current_ = new_block();
      targets.push_back(current_);
      lower(subregions[r]);
      for (std::size_t n = 0; n < exits.size(); n++)
      {
        if (exits[n])
          copy(*exits[n], lookup(graph_.origin(graph_.result(subregions[r], n))));
      }
      ends.push_back(current_);
    }
    auto join = new_block();
    for (auto end : ends)
      jump(end, join);

    if (targets.size() == 1)
      jump(split, targets[0]);
    else
    {
      auto & term = entity_.blocks[split].terminator;
      term.kind = ir::Terminator::Kind::Branch;
      term.value = predicate;
      term.targets = targets;
    }
    current_ = join;
    for (std::size_t n = 0; n < exits.size(); n++)
    {
      if (exits[n])
        env_[graph_.output(gamma, n)] = *exits[n];
    }
  }

  void
  lower_theta(NodeId theta)
  {
    auto body = graph_.subregion(theta);
    std::vector<std::optional<ir::Operand>> vars;
    for (std::size_t n = 0; n < graph_.num_loop_vars(theta); n++)
    {
      auto lv = graph_.loop_var(theta, n);
      if (!graph_.type(lv.output).is_value())
      {
        vars.emplace_back();
        continue;
      }
      auto var = fresh(graph_.type(lv.output));
      copy(var, lookup(graph_.origin(lv.input)));
      env_[lv.argument] = var;
      vars.push_back(var);
    }

    auto head = new_block();
    jump(current_, head);
    current_ = head;
    lower(body);

    // loop variables are updated in parallel: values read from other loop variables go through
    // temporaries first
    auto stable = [&](OriginId origin) {
      auto value = lookup(origin);
      if (graph_.is_argument(origin))
      {
        auto temp = fresh(graph_.type(origin));
        copy(temp, value);
        return temp;
      }
      return value;
    };
    std::vector<std::pair<ir::Operand, ir::Operand>> updates;
    for (std::size_t n = 0; n < vars.size(); n++)
    {
      if (!vars[n])
        continue;
      auto lv = graph_.loop_var(theta, n);
      auto origin = graph_.origin(lv.result);
      if (origin == lv.argument)
        continue;
      updates.emplace_back(*vars[n], stable(origin));
    }
    auto predicate = stable(graph_.origin(graph_.result(body, 0)));
    for (const auto & [target, source] : updates)
      copy(target, source);

    auto exit = new_block();
    auto & term = entity_.blocks[current_].terminator;
    term.kind = ir::Terminator::Kind::Branch;
    term.value = predicate;
    term.targets = { exit, head };
    current_ = exit;
    for (std::size_t n = 0; n < vars.size(); n++)
    {
      if (vars[n])
        env_[graph_.loop_var(theta, n).output] = *vars[n];
    }
  }

  const Graph & graph_;
  const std::unordered_map<OriginId, std::string> & symbols_;
  ir::Entity entity_;
  std::unordered_map<OriginId, ir::Operand> env_;
  std::size_t current_ = 0;
  std::size_t next_variable_ = 0;
};

class Recovery
{
public:
  explicit Recovery(const Graph & graph)
      : graph_(graph)
  {}

  ir::Module
  run()
  {
    auto root = graph_.root();
    for (auto result : graph_.results(root))
    {
      auto origin = graph_.origin(result);
      if (!exports_.count(origin))
        exports_[origin] = graph_.name(result);
    }

    for (auto argument : graph_.arguments(root))
    {
      ir::Entity entity;
      entity.name = reserve(graph_.name(argument));
      entity.type = graph_.type(argument);
      entity.kind = entity.type.is_function() ? ir::Entity::Kind::Function : ir::Entity::Kind::Global;
      entity.external = true;
      symbols_[argument] = entity.name;
      module_.entities.push_back(std::move(entity));
    }

    for (auto node : graph_.topological_order(root))
    {
      if (graph_.kind(node) == NodeKind::Phi)
        recover_phi(node);
      else
      {
        auto output = graph_.output(node, 0);
        auto name = entity_name(node, output);
        symbols_[output] = name;
        recover(node, symbols_, name, exports_.count(output) != 0);
      }
    }
    return std::move(module_);
  }

private:
  std::string
  reserve(std::string name)
  {
    auto base = name;
    for (std::size_t n = 1; used_.count(name); n++)
      name = base + "_" + std::to_string(n);
    used_.insert(name);
    return name;
  }

  std::string
  entity_name(NodeId node, OriginId output)
  {
    auto it = exports_.find(output);
    return reserve(it != exports_.end() ? it->second : graph_.name(node));
  }

  void
  recover(
      NodeId node,
      const std::unordered_map<OriginId, std::string> & symbols,
      const std::string & name,
      bool exported)
  {
    if (graph_.kind(node) != NodeKind::Lambda && graph_.kind(node) != NodeKind::Delta)
      throw InvariantError("unexpected " + graph_.label(node) + " node in the root region");
    auto entity = scfr(graph_, node, symbols);
    entity.name = name;
    entity.exported = exported;
    module_.entities.push_back(std::move(entity));
  }

  void
  recover_phi(NodeId phi)
  {
    auto region = graph_.subregion(phi);
    std::unordered_map<OriginId, std::string> inner;
    for (std::size_t n = 0; n < graph_.num_context_vars(phi); n++)
    {
      auto cv = graph_.context_var(phi, n);
      inner[cv.argument] = symbols_.at(graph_.origin(cv.input));
    }

    std::unordered_map<NodeId, std::pair<std::string, bool>> members;
    for (std::size_t n = 0; n < graph_.num_recursion_vars(phi); n++)
    {
      auto rv = graph_.recursion_var(phi, n);
      auto origin = graph_.origin(rv.result);
      if (graph_.is_argument(origin))
        throw InvariantError("recursion variable bound to a region argument");
      auto member = graph_.producer(origin);
      auto name = entity_name(member, rv.output);
      members[member] = { name, exports_.count(rv.output) != 0 };
      inner[rv.argument] = name;
      inner[origin] = name;
      symbols_[rv.output] = name;
    }

    for (auto node : graph_.topological_order(region))
    {
      auto it = members.find(node);
      if (it == members.end())
        throw InvariantError("φ region node without a recursion variable");
      recover(node, inner, it->second.first, it->second.second);
    }
  }

  const Graph & graph_;
  ir::Module module_;
  std::unordered_map<OriginId, std::string> exports_;
  std::unordered_map<OriginId, std::string> symbols_;
  std::set<std::string> used_;
};

}

ir::Entity
scfr(const Graph & graph, NodeId node, const std::unordered_map<OriginId, std::string> & symbols)
{
  return Lowering(graph, symbols).run(node);
}

ir::Module
inter_pcfr(const Graph & graph)
{
  return Recovery(graph).run();
}

ir::Module
destruct(const Graph & graph)
{
  auto module = inter_pcfr(graph);
  for (auto & entity : module.entities)
  {
    if (!entity.external)
      ir::construct_ssa(entity);
  }
  return module;
}

}
