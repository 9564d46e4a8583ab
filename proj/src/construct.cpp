#include <rvsdg/construction.hpp>
#include <rvsdg/error.hpp>

#include <bit>
#include <map>

namespace rvsdg
{

namespace
{

using SymbolTable = std::map<std::string, OriginId>;

constexpr const char * return_variable = "!ret";

class Translator
{
public:
  Translator(Graph & graph, const ir::Entity & body)
      : graph_(graph),
        body_(body)
  {}

  void
  translate(const ControlTreeNode & node, RegionId region, SymbolTable & table)
  {
    switch (node.kind)
    {
    case TreeKind::Block:
      translate_block(body_.blocks[node.block], region, table);
      break;
    case TreeKind::Linear:
      for (const auto & child : node.children)
        translate(child, region, table);
      break;
    case TreeKind::Branch:
      translate_branch(node, region, table);
      break;
    case TreeKind::Loop:
      translate_loop(node, region, table);
      break;
    }
  }

  /// Binds variables demanded at the start of a body that nothing defines to undef values.
  void
  bind_undefined(const VariableSet & demand, RegionId region, SymbolTable & table)
  {
    auto types = ir::variable_types(body_);
    std::map<std::string, Type> by_name(types.begin(), types.end());
    for (const auto & v : demand)
    {
      if (table.count(v))
        continue;
      auto it = by_name.find(v);
      if (it == by_name.end())
        throw InvariantError("demanded symbol " + v + " is unknown in @" + body_.name);
      auto node = graph_.add_simple(region, Operation::undef(it->second), {});
      table[v] = graph_.output(node, 0);
    }
  }

private:
  static OriginId
  lookup(const SymbolTable & table, const std::string & name)
  {
    auto it = table.find(name);
    if (it == table.end())
      throw InvariantError("missing symbol " + name + " during control tree translation");
    return it->second;
  }

  OriginId
  operand(const ir::Operand & o, RegionId region, const SymbolTable & table)
  {
    switch (o.kind)
    {
    case ir::Operand::Kind::Variable:
      return lookup(table, o.name);
    case ir::Operand::Kind::Symbol:
      return lookup(table, "@" + o.name);
    case ir::Operand::Kind::Literal:
      break;
    }
    auto op = o.type.kind() == TypeKind::Float ? Operation::float_constant(std::bit_cast<double>(o.bits))
                                               : Operation::int_constant(o.type, o.bits);
    return graph_.output(graph_.add_simple(region, op, {}), 0);
  }

  void
  translate_block(const ir::BasicBlock & block, RegionId region, SymbolTable & table)
  {
    for (const auto & inst : block.instructions)
    {
      std::vector<OriginId> inputs;
      switch (inst.kind)
      {
      case ir::InstKind::Phi:
        throw InvariantError("phi reached control tree translation");
      case ir::InstKind::Copy:
        table[inst.result] = operand(inst.operands[0], region, table);
        break;
      case ir::InstKind::Call:
      {
        const auto & signature = inst.operands[0].type.signature();
        for (const auto & o : inst.operands)
          inputs.push_back(operand(o, region, table));
        inputs.push_back(lookup(table, memory_state_variable));
        inputs.push_back(lookup(table, io_state_variable));
        auto node = graph_.add_simple(region, Operation::apply(signature), inputs);
        auto results = signature.results.size();
        if (inst.has_result())
          table[inst.result] = graph_.output(node, 0);
        table[memory_state_variable] = graph_.output(node, results);
        table[io_state_variable] = graph_.output(node, results + 1);
        break;
      }
      case ir::InstKind::Op:
      {
        const auto & op = *inst.op;
        for (const auto & o : inst.operands)
          inputs.push_back(operand(o, region, table));
        switch (op.code())
        {
        case OpCode::Alloca:
        {
          auto node = graph_.add_simple(region, op, { lookup(table, memory_state_variable) });
          table[inst.result] = graph_.output(node, 0);
          table[memory_state_variable] = graph_.output(node, 1);
          break;
        }
        case OpCode::Load:
        {
          auto node = graph_.add_simple(region, op, { inputs[0], lookup(table, memory_state_variable) });
          table[inst.result] = graph_.output(node, 0);
          table[memory_state_variable] = graph_.output(node, 1);
          break;
        }
        case OpCode::Store:
        {
          auto node =
              graph_.add_simple(region, op, { inputs[1], inputs[0], lookup(table, memory_state_variable) });
          table[memory_state_variable] = graph_.output(node, 0);
          break;
        }
        case OpCode::Match:
        {
          auto match = graph_.add_simple(region, op, inputs);
          auto value = graph_.add_simple(
              region,
              Operation::ctl_to_int(op.alternatives(), inst.type),
              { graph_.output(match, 0) });
          table[inst.result] = graph_.output(value, 0);
          break;
        }
        default:
        {
          auto node = graph_.add_simple(region, op, inputs);
          table[inst.result] = graph_.output(node, 0);
          break;
        }
        }
        break;
      }
      }
    }

    if (block.terminator.kind == ir::Terminator::Kind::Return && block.terminator.value)
      table[return_variable] = operand(*block.terminator.value, region, table);
  }

  /// Control value selecting terminator target i for selector value i; out-of-range values select
  /// the last target.
  OriginId
  predicate(const ir::Terminator & term, RegionId region, const SymbolTable & table, const std::vector<unsigned> & map)
  {
    auto selector = operand(*term.value, region, table);
    auto k = static_cast<unsigned>(term.targets.size());
    unsigned alternatives = 0;
    for (auto a : map)
      alternatives = std::max(alternatives, a + 1);
    std::vector<MatchCase> cases;
    auto width = term.value->type.width();
    for (unsigned i = 0; i + 1 < k; i++)
    {
      if (width >= 32 || i < (1u << width))
        cases.push_back({ i, map[i] });
    }
    auto op = Operation::match(term.value->type, std::move(cases), map[k - 1], alternatives);
    return graph_.output(graph_.add_simple(region, op, { selector }), 0);
  }

  void
  translate_branch(const ControlTreeNode & node, RegionId region, SymbolTable & table)
  {
    const auto & term = body_.blocks[node.block].terminator;
    std::vector<unsigned> identity(term.targets.size());
    for (unsigned i = 0; i < identity.size(); i++)
      identity[i] = i;
    auto gamma = graph_.add_gamma(region, predicate(term, region, table, identity));

    std::vector<SymbolTable> tables(node.children.size());
    for (const auto & v : node.demand)
    {
      auto ev = graph_.add_entry_var(gamma, lookup(table, v));
      for (std::size_t i = 0; i < tables.size(); i++)
        tables[i][v] = ev.arguments[i];
    }
    for (std::size_t i = 0; i < node.children.size(); i++)
      translate(node.children[i], graph_.subregion(gamma, i), tables[i]);

    for (const auto & v : node.demand_out)
    {
      std::vector<OriginId> origins;
      for (const auto & t : tables)
        origins.push_back(lookup(t, v));
      table[v] = graph_.add_exit_var(gamma, origins).output;
    }
  }

  void
  translate_loop(const ControlTreeNode & node, RegionId region, SymbolTable & table)
  {
    auto theta = graph_.add_theta(region);
    auto body = graph_.subregion(theta);
    SymbolTable inner;
    std::vector<LoopVar> vars;
    for (const auto & v : node.demand)
    {
      auto lv = graph_.add_loop_var(theta, lookup(table, v));
      inner[v] = lv.argument;
      vars.push_back(lv);
    }
    translate(node.children.front(), body, inner);

    std::size_t n = 0;
    for (const auto & v : node.demand)
    {
      graph_.set_origin(vars[n].result, lookup(inner, v));
      table[v] = vars[n].output;
      n++;
    }

    const auto & term = body_.blocks[node.block].terminator;
    std::vector<unsigned> map(term.targets.size(), 0);
    map[node.repeat] = 1;
    graph_.set_predicate(theta, predicate(term, body, inner, map));
  }

  Graph & graph_;
  const ir::Entity & body_;
};

struct Prepared
{
  ir::Entity body;
  ControlTreeNode tree;
};

Prepared
prepare(const ir::Entity & entity, FunctionStats & stats)
{
  Prepared p;
  stats.name = entity.name;
  stats.blocks = entity.blocks.size();
  for (const auto & block : entity.blocks)
    stats.instructions += block.instructions.size() + 1;
  p.body = prepare_body(entity, &stats.restructure);
  p.tree = structural_analysis(p.body);
  annotate_demands(p.body, p.tree, entity.is_function());
  return p;
}

/// Builds the λ- or δ-node of one entity; \p symbols resolves referenced entities in \p region.
NodeId
build_entity(
    Graph & graph,
    RegionId region,
    const ir::Entity & entity,
    const std::map<std::string, OriginId> & symbols,
    ConstructionStats * stats)
{
  FunctionStats fs;
  auto prepared = prepare(entity, fs);
  if (stats)
    stats->functions.push_back(fs);

  NodeId node = entity.is_function() ? graph.add_lambda(region, entity.name, entity.type.signature())
                                     : graph.add_delta(region, entity.name, entity.type);
  auto body = graph.subregion(node);
  SymbolTable table;
  for (const auto & v : prepared.tree.demand)
  {
    if (v.empty() || v[0] != '@')
      continue;
    auto it = symbols.find(v.substr(1));
    if (it == symbols.end())
      throw InvariantError("unresolved symbol " + v);
    table[v] = graph.add_context_var(node, it->second).argument;
  }

  if (entity.is_function())
  {
    for (std::size_t n = 0; n < entity.parameters.size(); n++)
      table[entity.parameters[n]] = graph.lambda_parameter(node, n);
    auto args = graph.arguments(body).size();
    table[memory_state_variable] = graph.argument(body, args - 2);
    table[io_state_variable] = graph.argument(body, args - 1);
  }

  Translator translator(graph, prepared.body);
  translator.bind_undefined(prepared.tree.demand, body, table);
  translator.translate(prepared.tree, body, table);

  if (entity.is_function())
  {
    std::vector<OriginId> results;
    if (entity.return_type())
      results.push_back(table.at(return_variable));
    results.push_back(table.at(memory_state_variable));
    results.push_back(table.at(io_state_variable));
    graph.set_lambda_results(node, results);
  }
  else
  {
    graph.set_delta_result(node, table.at(return_variable));
  }
  return node;
}

}

Graph
construct(const ir::Module & module, ConstructionStats * stats)
{
  Graph graph;
  auto root = graph.root();
  auto ipg = ir::compute_ipg(module);
  std::set<std::pair<std::size_t, std::size_t>> edges(ipg.edges.begin(), ipg.edges.end());
  std::map<std::string, OriginId> symbols;

  for (const auto & component : ir::ipg_components(ipg))
  {
    const auto & first = module.entities[component.front()];
    if (component.size() == 1 && !edges.count({ component.front(), component.front() }))
    {
      if (first.external)
        symbols[first.name] = graph.add_import(first.name, first.type);
      else
        symbols[first.name] = graph.output(build_entity(graph, root, first, symbols, stats), 0);
      continue;
    }

    auto phi = graph.add_phi(root);
    auto inner_region = graph.subregion(phi);
    std::set<std::string> members;
    for (auto index : component)
      members.insert(module.entities[index].name);

    std::map<std::string, OriginId> inner;
    std::vector<RecursionVar> vars;
    for (auto index : component)
    {
      const auto & entity = module.entities[index];
      auto rv = graph.add_recursion_var(phi, entity.type, entity.name);
      inner[entity.name] = rv.argument;
      vars.push_back(rv);
    }
    std::set<std::string> outside;
    for (auto index : component)
    {
      for (auto target : ipg.successors(index))
      {
        const auto & name = module.entities[target].name;
        if (!members.count(name))
          outside.insert(name);
      }
    }
    for (const auto & name : outside)
      inner[name] = graph.add_context_var(phi, symbols.at(name)).argument;

    for (std::size_t n = 0; n < component.size(); n++)
    {
      const auto & entity = module.entities[component[n]];
      auto node = build_entity(graph, inner_region, entity, inner, stats);
      graph.set_recursion_result(phi, n, graph.output(node, 0));
      symbols[entity.name] = vars[n].output;
    }
  }

  for (const auto & entity : module.entities)
  {
    if (entity.exported && !entity.external)
      graph.add_export(symbols.at(entity.name), entity.name);
  }
  return graph;
}

}
