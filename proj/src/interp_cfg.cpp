#include <rvsdg/error.hpp>
#include <rvsdg/interp.hpp>

#include <unordered_map>

namespace rvsdg
{

namespace
{

struct Slot
{
  enum class Kind : std::uint8_t
  {
    Variable,
    Constant,
    Global
  };

  Kind kind = Kind::Constant;
  std::uint32_t index = 0;
  Value constant;
};

struct CompiledInst
{
  const ir::Instruction * source = nullptr;
  std::int32_t result = -1;
  std::vector<Slot> operands;
};

struct CompiledBlock
{
  std::vector<CompiledInst> phis;
  std::vector<CompiledInst> body;
  const ir::Terminator * terminator = nullptr;
  std::optional<Slot> value;
};

struct CompiledBody
{
  std::vector<Value> initial;
  std::vector<std::uint32_t> parameters;
  std::vector<CompiledBlock> blocks;
};

}

struct CfgInterpreter::Impl
{
  explicit Impl(const ir::Module & m)
      : module(m)
  {}

  const ir::Module & module;
  std::unordered_map<const ir::Entity *, std::unique_ptr<CompiledBody>> bodies;

  // per run
  Machine * machine = nullptr;
  std::unordered_map<const ir::Entity *, Value> global_values;
  std::unordered_map<const ir::Entity *, bool> global_in_progress;

  const CompiledBody &
  compile(const ir::Entity & entity);

  Value
  global_value(const ir::Entity & entity);

  Value
  read(const Slot & slot, const std::vector<Value> & frame);

  std::vector<Value>
  call(const Value & callee, const FunctionSignature & signature, std::span<const Value> args);

  std::optional<Value>
  execute(const ir::Entity & entity, std::span<const Value> args);
};

const CompiledBody &
CfgInterpreter::Impl::compile(const ir::Entity & entity)
{
  auto & cached = bodies[&entity];
  if (cached)
    return *cached;
  auto body = std::make_unique<CompiledBody>();

  std::unordered_map<std::string, std::uint32_t> slots;
  for (const auto & [name, type] : ir::variable_types(entity))
  {
    slots.emplace(name, static_cast<std::uint32_t>(body->initial.size()));
    body->initial.push_back(Value::zero(type));
  }
  for (const auto & p : entity.parameters)
    body->parameters.push_back(slots.at(p));

  auto slot_of = [&](const ir::Operand & o)
  {
    Slot s;
    switch (o.kind)
    {
    case ir::Operand::Kind::Variable:
      s.kind = Slot::Kind::Variable;
      s.index = slots.at(o.name);
      break;
    case ir::Operand::Kind::Literal:
      s.kind = Slot::Kind::Constant;
      if (o.type.kind() == TypeKind::Float)
        s.constant = Value{ TypeKind::Float, 64, o.bits, nullptr };
      else if (o.type.kind() == TypeKind::Pointer)
        s.constant = Value::pointer(o.bits);
      else
        s.constant = Value::integer(o.type.width(), o.bits);
      break;
    case ir::Operand::Kind::Symbol:
    {
      auto target = module.index_of(o.name);
      if (!target)
        throw Error("undefined symbol @" + o.name);
      if (module.entities[*target].is_function())
      {
        s.kind = Slot::Kind::Constant;
        s.constant = Value::function_ref(o.name);
      }
      else
      {
        s.kind = Slot::Kind::Global;
        s.index = static_cast<std::uint32_t>(*target);
      }
      break;
    }
    }
    return s;
  };

  for (const auto & block : entity.blocks)
  {
    CompiledBlock compiled;
    for (const auto & inst : block.instructions)
    {
      CompiledInst ci;
      ci.source = &inst;
      if (inst.has_result())
        ci.result = static_cast<std::int32_t>(slots.at(inst.result));
      for (const auto & o : inst.operands)
        ci.operands.push_back(slot_of(o));
      if (inst.kind == ir::InstKind::Phi)
        compiled.phis.push_back(std::move(ci));
      else
        compiled.body.push_back(std::move(ci));
    }
    compiled.terminator = &block.terminator;
    if (block.terminator.value)
      compiled.value = slot_of(*block.terminator.value);
    body->blocks.push_back(std::move(compiled));
  }
  cached = std::move(body);
  return *cached;
}

Value
CfgInterpreter::Impl::global_value(const ir::Entity & entity)
{
  if (auto it = global_values.find(&entity); it != global_values.end())
    return it->second;
  if (entity.external)
    throw Trap(TrapKind::UnresolvedCallee, "external global @" + entity.name + " has no value");
  if (global_in_progress[&entity])
    throw Trap(TrapKind::CallDepth, "cyclic initializer of @" + entity.name);
  global_in_progress[&entity] = true;
  auto value = *execute(entity, {});
  global_in_progress[&entity] = false;
  global_values[&entity] = value;
  return value;
}

Value
CfgInterpreter::Impl::read(const Slot & slot, const std::vector<Value> & frame)
{
  switch (slot.kind)
  {
  case Slot::Kind::Variable:
    return frame[slot.index];
  case Slot::Kind::Constant:
    return slot.constant;
  case Slot::Kind::Global:
    return global_value(module.entities[slot.index]);
  }
  return {};
}

std::vector<Value>
CfgInterpreter::Impl::call(
    const Value & callee,
    const FunctionSignature & signature,
    std::span<const Value> args)
{
  if (!callee.function)
    throw Trap(TrapKind::InvalidFunction, "call through an undefined function value");
  auto entity = module.find(*callee.function);
  if (!entity || !entity->is_function())
    throw Trap(TrapKind::UnresolvedCallee, "unknown function @" + *callee.function);
  if (entity->type.signature() != signature)
    throw Trap(TrapKind::InvalidFunction, "call of @" + entity->name + " with a mismatched signature");
  if (entity->external)
    return machine->call_external(entity->name, signature, args);
  auto result = execute(*entity, args);
  if (result)
    return { *result };
  return {};
}

std::optional<Value>
CfgInterpreter::Impl::execute(const ir::Entity & entity, std::span<const Value> args)
{
  const auto & body = compile(entity);
  machine->enter_call();
  std::vector<Value> frame = body.initial;
  for (std::size_t n = 0; n < body.parameters.size(); n++)
    frame[body.parameters[n]] = args[n];

  std::size_t current = 0;
  std::size_t previous = 0;
  std::vector<Value> phi_values;
  std::vector<Value> inputs;
  while (true)
  {
    const auto & block = body.blocks[current];
    if (!block.phis.empty())
    {
      phi_values.clear();
      for (const auto & phi : block.phis)
      {
        machine->consume();
        const auto & incoming = phi.source->incoming;
        std::size_t n = 0;
        while (incoming[n] != previous)
          n++;
        phi_values.push_back(read(phi.operands[n], frame));
      }
      for (std::size_t n = 0; n < block.phis.size(); n++)
        frame[static_cast<std::size_t>(block.phis[n].result)] = phi_values[n];
    }

    for (const auto & ci : block.body)
    {
      machine->consume();
      const auto & inst = *ci.source;
      inputs.clear();
      for (const auto & s : ci.operands)
        inputs.push_back(read(s, frame));

      Value result;
      switch (inst.kind)
      {
      case ir::InstKind::Copy:
        result = inputs[0];
        break;
      case ir::InstKind::Call:
      {
        const auto & sig = inst.operands[0].type.signature();
        auto results = call(inputs[0], sig, std::span<const Value>(inputs).subspan(1));
        if (!results.empty())
          result = results[0];
        break;
      }
      case ir::InstKind::Phi:
        throw InvariantError("phi in block body");
      case ir::InstKind::Op:
      {
        const auto & op = *inst.op;
        switch (op.code())
        {
        case OpCode::Alloca:
          result = machine->allocate(op.count());
          break;
        case OpCode::Load:
          result = machine->load(op.type(), inputs[0]);
          break;
        case OpCode::Store:
          machine->store(inputs[1], inputs[0]);
          break;
        case OpCode::Match:
          result = Value::integer(inst.type.width(), op.select(inputs[0].bits));
          break;
        default:
          result = evaluate(op, inputs);
          break;
        }
        break;
      }
      }
      if (ci.result >= 0)
        frame[static_cast<std::size_t>(ci.result)] = result;
    }

    machine->consume();
    const auto & term = *block.terminator;
    switch (term.kind)
    {
    case ir::Terminator::Kind::Jump:
      previous = current;
      current = term.targets[0];
      break;
    case ir::Terminator::Kind::Branch:
    {
      auto selector = read(*block.value, frame).bits;
      previous = current;
      current = selector < term.targets.size() ? term.targets[selector] : term.targets.back();
      break;
    }
    case ir::Terminator::Kind::Return:
    {
      machine->leave_call();
      if (block.value)
        return read(*block.value, frame);
      return std::nullopt;
    }
    }
  }
}

CfgInterpreter::CfgInterpreter(const ir::Module & module)
    : impl_(std::make_unique<Impl>(module))
{}

CfgInterpreter::~CfgInterpreter() = default;

EvalResult
CfgInterpreter::run(std::string_view name, std::span<const Value> arguments, std::uint64_t fuel)
{
  auto entity = impl_->module.find(name);
  if (!entity)
    throw Error("no entity @" + std::string(name));
  if (entity->is_function() && entity->type.signature().parameters.size() != arguments.size())
    throw Error("@" + std::string(name) + " expects "
                + std::to_string(entity->type.signature().parameters.size()) + " arguments");

  Machine machine(fuel);
  impl_->machine = &machine;
  impl_->global_values.clear();
  impl_->global_in_progress.clear();
  EvalResult result;
  try
  {
    if (entity->is_function())
    {
      auto values = impl_->call(Value::function_ref(name), entity->type.signature(), arguments);
      result.results = std::move(values);
    }
    else
    {
      result.results.push_back(impl_->global_value(*entity));
    }
  }
  catch (const Trap & trap)
  {
    result.trap = trap.kind();
    result.trap_message = trap.message();
  }
  result.steps = machine.steps();
  result.trace = machine.take_trace();
  impl_->machine = nullptr;
  return result;
}

EvalResult
eval_cfg(
    const ir::Module & module,
    std::string_view name,
    std::span<const Value> arguments,
    std::uint64_t fuel)
{
  CfgInterpreter interpreter(module);
  return interpreter.run(name, arguments, fuel);
}

}
