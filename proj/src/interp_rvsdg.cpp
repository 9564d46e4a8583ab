#include <rvsdg/error.hpp>
#include <rvsdg/interp.hpp>

#include <unordered_map>

namespace rvsdg
{

namespace
{

struct CompiledNode
{
  NodeId node;
  NodeKind kind = NodeKind::Simple;
  const Operation * op = nullptr;
  std::vector<std::uint32_t> inputs;
  std::uint32_t first_output = 0;
  std::uint32_t num_outputs = 0;
};

struct CompiledRegion
{
  std::uint32_t num_slots = 0;
  std::uint32_t num_arguments = 0;
  std::vector<CompiledNode> nodes;
  std::vector<std::uint32_t> results;
};

}

struct RvsdgInterpreter::Impl
{
  explicit Impl(const Graph & g)
      : graph(g)
  {
    index_functions(graph.root());
  }

  const Graph & graph;
  std::unordered_map<RegionId, std::unique_ptr<CompiledRegion>> regions;
  std::unordered_map<const std::string *, NodeId> lambdas;
  std::unordered_map<const std::string *, OriginId> imports;

  // per run
  Machine * machine = nullptr;
  std::unordered_map<OriginId, Value> statics;
  std::unordered_map<NodeId, bool> delta_in_progress;

  void
  index_functions(RegionId region)
  {
    for (auto arg : graph.arguments(region))
    {
      if (region == graph.root() && graph.type(arg).is_function())
        imports[intern_name(graph.name(arg))] = arg;
    }
    for (auto node : graph.nodes(region))
    {
      if (graph.kind(node) == NodeKind::Lambda)
        lambdas[intern_name(graph.name(node))] = node;
      else if (graph.kind(node) == NodeKind::Phi)
        index_functions(graph.subregion(node));
    }
  }

  const CompiledRegion &
  compile(RegionId region);

  Value
  static_value(OriginId origin);

  std::vector<Value>
  call(const Value & callee, const FunctionSignature & signature, std::span<const Value> args);

  std::vector<Value>
  activate_lambda(NodeId lambda, std::span<const Value> args);

  void
  evaluate_region(const CompiledRegion & region, std::vector<Value> & frame);

  void
  evaluate_node(const CompiledNode & cn, std::vector<Value> & frame);
};

const CompiledRegion &
RvsdgInterpreter::Impl::compile(RegionId region)
{
  auto & cached = regions[region];
  if (cached)
    return *cached;
  auto compiled = std::make_unique<CompiledRegion>();
  std::unordered_map<OriginId, std::uint32_t> slots;
  std::uint32_t next = 0;
  for (auto arg : graph.arguments(region))
    slots[arg] = next++;
  compiled->num_arguments = next;
  for (auto node : graph.topological_order(region))
  {
    CompiledNode cn;
    cn.node = node;
    cn.kind = graph.kind(node);
    if (cn.kind == NodeKind::Simple)
      cn.op = &graph.operation(node);
    for (auto user : graph.inputs(node))
      cn.inputs.push_back(slots.at(graph.origin(user)));
    cn.first_output = next;
    for (auto out : graph.outputs(node))
      slots[out] = next++;
    cn.num_outputs = next - cn.first_output;
    compiled->nodes.push_back(std::move(cn));
  }
  for (auto user : graph.results(region))
    compiled->results.push_back(slots.at(graph.origin(user)));
  compiled->num_slots = next;
  cached = std::move(compiled);
  return *cached;
}

Value
RvsdgInterpreter::Impl::static_value(OriginId origin)
{
  if (auto it = statics.find(origin); it != statics.end())
    return it->second;

  Value value;
  auto region = graph.region(origin);
  if (graph.is_argument(origin))
  {
    if (region == graph.root())
    {
      if (!graph.type(origin).is_function())
        throw Trap(TrapKind::UnresolvedCallee, "external global @" + graph.name(origin) + " has no value");
      value = Value::function_ref(graph.name(origin));
    }
    else
    {
      auto owner = graph.owner(region);
      if (graph.kind(owner) != NodeKind::Phi)
        throw InvariantError("static value requested inside a " + graph.label(owner) + " region");
      auto input = graph.structural_input(origin);
      if (input.valid())
        value = static_value(graph.origin(input));
      else
      {
        auto n = graph.index(origin) - graph.num_context_vars(owner);
        value = static_value(graph.origin(graph.result(region, n)));
      }
    }
  }
  else
  {
    auto node = graph.producer(origin);
    switch (graph.kind(node))
    {
    case NodeKind::Lambda:
      value = Value::function_ref(graph.name(node));
      break;
    case NodeKind::Phi:
      value = static_value(graph.origin(graph.result(graph.subregion(node), graph.index(origin))));
      break;
    case NodeKind::Delta:
    {
      if (delta_in_progress[node])
        throw Trap(TrapKind::CallDepth, "cyclic initializer of @" + graph.name(node));
      delta_in_progress[node] = true;
      const auto & body = compile(graph.subregion(node));
      std::vector<Value> frame(body.num_slots);
      for (std::size_t n = 0; n < graph.num_context_vars(node); n++)
        frame[n] = static_value(graph.origin(graph.input(node, n)));
      machine->enter_call();
      evaluate_region(body, frame);
      machine->leave_call();
      value = frame[body.results[0]];
      delta_in_progress[node] = false;
      break;
    }
    default:
      throw InvariantError("static value of a " + graph.label(node) + " output");
    }
  }
  statics[origin] = value;
  return value;
}

std::vector<Value>
RvsdgInterpreter::Impl::call(
    const Value & callee,
    const FunctionSignature & signature,
    std::span<const Value> args)
{
  if (!callee.function)
    throw Trap(TrapKind::InvalidFunction, "call through an undefined function value");
  if (auto it = lambdas.find(callee.function); it != lambdas.end())
  {
    if (graph.lambda_signature(it->second) != signature)
      throw Trap(TrapKind::InvalidFunction, "call of @" + *callee.function + " with a mismatched signature");
    return activate_lambda(it->second, args);
  }
  if (auto it = imports.find(callee.function); it != imports.end())
  {
    if (graph.type(it->second).signature() != signature)
      throw Trap(TrapKind::InvalidFunction, "call of @" + *callee.function + " with a mismatched signature");
    return machine->call_external(*callee.function, signature, args);
  }
  throw Trap(TrapKind::UnresolvedCallee, "unknown function @" + *callee.function);
}

std::vector<Value>
RvsdgInterpreter::Impl::activate_lambda(NodeId lambda, std::span<const Value> args)
{
  machine->enter_call();
  const auto & body = compile(graph.subregion(lambda));
  std::vector<Value> frame(body.num_slots);
  auto cvs = graph.num_context_vars(lambda);
  for (std::size_t n = 0; n < cvs; n++)
    frame[n] = static_value(graph.origin(graph.input(lambda, n)));
  for (std::size_t n = 0; n < args.size(); n++)
    frame[cvs + n] = args[n];
  frame[body.num_arguments - 2] = Value::state(TypeKind::MemoryState);
  frame[body.num_arguments - 1] = Value::state(TypeKind::IoState);
  evaluate_region(body, frame);
  std::vector<Value> results;
  for (std::size_t n = 0; n + 2 < body.results.size(); n++)
    results.push_back(frame[body.results[n]]);
  machine->leave_call();
  return results;
}

void
RvsdgInterpreter::Impl::evaluate_region(const CompiledRegion & region, std::vector<Value> & frame)
{
  for (const auto & cn : region.nodes)
    evaluate_node(cn, frame);
}

void
RvsdgInterpreter::Impl::evaluate_node(const CompiledNode & cn, std::vector<Value> & frame)
{
  machine->consume();
  auto in = [&](std::size_t n) -> const Value &
  {
    return frame[cn.inputs[n]];
  };
  auto out = [&](std::size_t n) -> Value &
  {
    return frame[cn.first_output + n];
  };

  switch (cn.kind)
  {
  case NodeKind::Simple:
  {
    const auto & op = *cn.op;
    switch (op.code())
    {
    case OpCode::Alloca:
      out(0) = machine->allocate(op.count());
      out(1) = in(0);
      return;
    case OpCode::Load:
      out(0) = machine->load(op.type(), in(0));
      out(1) = in(1);
      return;
    case OpCode::Store:
      machine->store(in(0), in(1));
      out(0) = in(2);
      return;
    case OpCode::Apply:
    {
      std::vector<Value> args;
      auto count = cn.inputs.size();
      for (std::size_t n = 1; n + 2 < count; n++)
        args.push_back(in(n));
      auto results = call(in(0), op.signature(), args);
      for (std::size_t n = 0; n < results.size(); n++)
        out(n) = results[n];
      out(results.size()) = in(count - 2);
      out(results.size() + 1) = in(count - 1);
      return;
    }
    default:
    {
      Value inputs[2];
      for (std::size_t n = 0; n < cn.inputs.size(); n++)
        inputs[n] = in(n);
      out(0) = evaluate(op, std::span<const Value>(inputs, cn.inputs.size()));
      return;
    }
    }
  }
  case NodeKind::Gamma:
  {
    auto alternative = in(0).bits;
    const auto & body = compile(graph.subregion(cn.node, alternative));
    std::vector<Value> sub(body.num_slots);
    for (std::size_t n = 1; n < cn.inputs.size(); n++)
      sub[n - 1] = in(n);
    evaluate_region(body, sub);
    for (std::size_t n = 0; n < cn.num_outputs; n++)
      out(n) = sub[body.results[n]];
    return;
  }
  case NodeKind::Theta:
  {
    const auto & body = compile(graph.subregion(cn.node));
    std::vector<Value> sub(body.num_slots);
    for (std::size_t n = 0; n < cn.inputs.size(); n++)
      sub[n] = in(n);
    std::vector<Value> next(cn.inputs.size());
    while (true)
    {
      evaluate_region(body, sub);
      for (std::size_t n = 0; n < next.size(); n++)
        next[n] = sub[body.results[n + 1]];
      bool repeat = sub[body.results[0]].bits == 1;
      for (std::size_t n = 0; n < next.size(); n++)
        sub[n] = next[n];
      if (!repeat)
        break;
      machine->consume();
    }
    for (std::size_t n = 0; n < cn.num_outputs; n++)
      out(n) = sub[n];
    return;
  }
  case NodeKind::Lambda:
    out(0) = Value::function_ref(graph.name(cn.node));
    return;
  case NodeKind::Delta:
  case NodeKind::Phi:
    for (std::size_t n = 0; n < cn.num_outputs; n++)
      out(n) = static_value(graph.output(cn.node, n));
    return;
  case NodeKind::Omega:
    throw InvariantError("ω-node inside a region");
  }
}

RvsdgInterpreter::RvsdgInterpreter(const Graph & graph)
    : impl_(std::make_unique<Impl>(graph))
{}

RvsdgInterpreter::~RvsdgInterpreter() = default;

EvalResult
RvsdgInterpreter::run(std::string_view name, std::span<const Value> arguments, std::uint64_t fuel)
{
  const auto & graph = impl_->graph;
  OriginId exported;
  for (auto user : graph.results(graph.root()))
  {
    if (graph.name(user) == name)
      exported = graph.origin(user);
  }
  if (!exported.valid())
    throw Error("no export @" + std::string(name));

  Machine machine(fuel);
  impl_->machine = &machine;
  impl_->statics.clear();
  impl_->delta_in_progress.clear();
  EvalResult result;
  try
  {
    const auto & type = graph.type(exported);
    auto value = impl_->static_value(exported);
    if (type.is_function())
    {
      if (type.signature().parameters.size() != arguments.size())
        throw Error("@" + std::string(name) + " expects "
                    + std::to_string(type.signature().parameters.size()) + " arguments");
      result.results = impl_->call(value, type.signature(), arguments);
    }
    else
    {
      result.results.push_back(value);
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
eval_rvsdg(
    const Graph & graph,
    std::string_view name,
    std::span<const Value> arguments,
    std::uint64_t fuel)
{
  RvsdgInterpreter interpreter(graph);
  return interpreter.run(name, arguments, fuel);
}

}
