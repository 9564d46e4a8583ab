#include <rvsdg/error.hpp>
#include <rvsdg/graph.hpp>

#include <algorithm>
#include <queue>

namespace rvsdg
{

std::string_view
node_kind_name(NodeKind kind) noexcept
{
  switch (kind)
  {
  case NodeKind::Simple:
    return "simple";
  case NodeKind::Gamma:
    return "gamma";
  case NodeKind::Theta:
    return "theta";
  case NodeKind::Lambda:
    return "lambda";
  case NodeKind::Delta:
    return "delta";
  case NodeKind::Phi:
    return "phi";
  case NodeKind::Omega:
    return "omega";
  }
  return "?";
}

Graph::Graph()
{
  NodeData data;
  data.kind = NodeKind::Omega;
  nodes_.push_back(std::move(data));
  create_region(NodeId(0));
}

const Operation &
Graph::operation(NodeId node) const
{
  const auto & data = nodes_[node.index];
  if (!data.operation)
    throw GraphError("node " + std::to_string(node.index) + " is not a simple node");
  return *data.operation;
}

std::string
Graph::label(NodeId node) const
{
  if (is_simple(node))
    return std::string(operation(node).name());
  return std::string(node_kind_name(kind(node)));
}

std::size_t
Graph::depth(RegionId region) const
{
  std::size_t d = 0;
  while (region != root())
  {
    region = parent(owner(region));
    d++;
  }
  return d;
}

bool
Graph::is_within(RegionId inner, RegionId outer) const
{
  while (true)
  {
    if (inner == outer)
      return true;
    if (inner == root())
      return false;
    inner = parent(owner(inner));
  }
}

UserId
Graph::structural_input(OriginId argument) const
{
  if (!is_argument(argument))
    return {};
  auto node = owner(region(argument));
  auto n = index(argument);
  switch (kind(node))
  {
  case NodeKind::Gamma:
    return input(node, n + 1);
  case NodeKind::Theta:
    return input(node, n);
  case NodeKind::Lambda:
  case NodeKind::Delta:
  case NodeKind::Phi:
    return n < inputs(node).size() ? input(node, n) : UserId();
  default:
    return {};
  }
}

OriginId
Graph::structural_output(UserId result) const
{
  if (!is_result(result))
    return {};
  auto node = owner(region(result));
  auto n = index(result);
  switch (kind(node))
  {
  case NodeKind::Gamma:
  case NodeKind::Phi:
    return output(node, n);
  case NodeKind::Theta:
    return n == 0 ? OriginId() : output(node, n - 1);
  default:
    return {};
  }
}

std::vector<OriginId>
Graph::bound_arguments(UserId user) const
{
  if (is_result(user))
    return {};
  auto node = consumer(user);
  auto n = index(user);
  switch (kind(node))
  {
  case NodeKind::Gamma:
  {
    if (n == 0)
      return {};
    std::vector<OriginId> args;
    for (auto r : subregions(node))
      args.push_back(argument(r, n - 1));
    return args;
  }
  case NodeKind::Theta:
  case NodeKind::Lambda:
  case NodeKind::Delta:
  case NodeKind::Phi:
    return { argument(subregion(node), n) };
  default:
    return {};
  }
}

EntryVar
Graph::entry_var(NodeId gamma, std::size_t n) const
{
  EntryVar ev{ input(gamma, n + 1), {} };
  for (auto r : subregions(gamma))
    ev.arguments.push_back(argument(r, n));
  return ev;
}

ExitVar
Graph::exit_var(NodeId gamma, std::size_t n) const
{
  ExitVar ex{ {}, output(gamma, n) };
  for (auto r : subregions(gamma))
    ex.results.push_back(result(r, n));
  return ex;
}

LoopVar
Graph::loop_var(NodeId theta, std::size_t n) const
{
  auto r = subregion(theta);
  return { input(theta, n), argument(r, n), result(r, n + 1), output(theta, n) };
}

ContextVar
Graph::context_var(NodeId node, std::size_t n) const
{
  return { input(node, n), argument(subregion(node), n) };
}

RecursionVar
Graph::recursion_var(NodeId phi, std::size_t n) const
{
  auto r = subregion(phi);
  return { result(r, n), argument(r, num_context_vars(phi) + n), output(phi, n) };
}

UserId
Graph::predicate(NodeId node) const
{
  if (kind(node) == NodeKind::Gamma)
    return input(node, 0);
  if (kind(node) == NodeKind::Theta)
    return result(subregion(node), 0);
  throw GraphError("only γ and θ nodes have predicates");
}

NodeId
Graph::create_node(NodeKind kind, RegionId parent)
{
  NodeId node(static_cast<std::uint32_t>(nodes_.size()));
  NodeData data;
  data.kind = kind;
  data.parent = parent;
  nodes_.push_back(std::move(data));
  regions_[parent.index].nodes.insert(node);
  return node;
}

RegionId
Graph::create_region(NodeId owner)
{
  RegionId region(static_cast<std::uint32_t>(regions_.size()));
  RegionData data;
  data.owner = owner;
  regions_.push_back(std::move(data));
  nodes_[owner.index].subregions.push_back(region);
  return region;
}

OriginId
Graph::create_origin(Type type, RegionId region, NodeId node, std::size_t index)
{
  OriginId origin(static_cast<std::uint32_t>(origins_.size()));
  origins_.push_back(OriginData{ std::move(type), region, node, index, {}, {} });
  return origin;
}

UserId
Graph::create_user(Type type, RegionId region, NodeId node, std::size_t index)
{
  UserId user(static_cast<std::uint32_t>(users_.size()));
  users_.push_back(UserData{ std::move(type), region, node, index, {}, {} });
  return user;
}

void
Graph::connect(UserId user, OriginId origin)
{
  auto & u = users_[user.index];
  if (!origin.valid())
  {
    u.origin = origin;
    return;
  }
  const auto & o = origins_[origin.index];
  if (o.region != u.region)
    throw GraphError("edge crosses region boundary");
  if (o.type != u.type)
    throw GraphError("type mismatch: origin " + o.type.str() + " vs user " + u.type.str());
  u.origin = origin;
  origins_[origin.index].users.push_back(user);
}

void
Graph::disconnect(UserId user)
{
  auto & u = users_[user.index];
  if (!u.origin.valid())
    return;
  auto & list = origins_[u.origin.index].users;
  list.erase(std::find(list.begin(), list.end(), user));
  u.origin = OriginId();
}

UserId
Graph::append_input(NodeId node, OriginId origin)
{
  auto & data = nodes_[node.index];
  auto user = create_user(type(origin), data.parent, node, data.inputs.size());
  nodes_[node.index].inputs.push_back(user);
  connect(user, origin);
  return user;
}

OriginId
Graph::append_output(NodeId node, Type type)
{
  auto & data = nodes_[node.index];
  auto origin = create_origin(std::move(type), data.parent, node, data.outputs.size());
  nodes_[node.index].outputs.push_back(origin);
  return origin;
}

OriginId
Graph::insert_argument(RegionId region, std::size_t position, Type type)
{
  auto origin = create_origin(std::move(type), region, NodeId(), position);
  auto & args = regions_[region.index].arguments;
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(position), origin);
  for (std::size_t n = position + 1; n < args.size(); n++)
    origins_[args[n].index].index = n;
  return origin;
}

UserId
Graph::append_result(RegionId region, OriginId origin, Type type)
{
  auto & results = regions_[region.index].results;
  auto user = create_user(std::move(type), region, NodeId(), results.size());
  regions_[region.index].results.push_back(user);
  connect(user, origin);
  return user;
}

void
Graph::erase_input(NodeId node, std::size_t n)
{
  auto & inputs = nodes_[node.index].inputs;
  disconnect(inputs.at(n));
  inputs.erase(inputs.begin() + static_cast<std::ptrdiff_t>(n));
  for (std::size_t i = n; i < inputs.size(); i++)
    users_[inputs[i].index].index = i;
}

void
Graph::erase_output(NodeId node, std::size_t n)
{
  auto & outputs = nodes_[node.index].outputs;
  require_unused(outputs.at(n), "output");
  outputs.erase(outputs.begin() + static_cast<std::ptrdiff_t>(n));
  for (std::size_t i = n; i < outputs.size(); i++)
    origins_[outputs[i].index].index = i;
}

void
Graph::erase_argument(RegionId region, std::size_t n)
{
  auto & args = regions_[region.index].arguments;
  require_unused(args.at(n), "argument");
  args.erase(args.begin() + static_cast<std::ptrdiff_t>(n));
  for (std::size_t i = n; i < args.size(); i++)
    origins_[args[i].index].index = i;
}

void
Graph::erase_result(RegionId region, std::size_t n)
{
  auto & results = regions_[region.index].results;
  disconnect(results.at(n));
  results.erase(results.begin() + static_cast<std::ptrdiff_t>(n));
  for (std::size_t i = n; i < results.size(); i++)
    users_[results[i].index].index = i;
}

void
Graph::require_kind(NodeId node, NodeKind expected, const char * what) const
{
  if (!is_alive(node) || kind(node) != expected)
    throw GraphError(std::string(what) + " expects a " + std::string(node_kind_name(expected))
                     + " node");
}

void
Graph::require_unused(OriginId origin, const char * what) const
{
  if (!users(origin).empty())
    throw GraphError(std::string("cannot remove ") + what + " with "
                     + std::to_string(users(origin).size()) + " users");
}

NodeId
Graph::add_simple(RegionId region, Operation op, std::span<const OriginId> operands)
{
  auto input_types = op.input_types();
  if (input_types.size() != operands.size())
    throw GraphError(
        op.str() + " expects " + std::to_string(input_types.size()) + " operands, got "
        + std::to_string(operands.size()));
  for (std::size_t n = 0; n < operands.size(); n++)
  {
    if (type(operands[n]) != input_types[n])
      throw GraphError(
          op.str() + " operand " + std::to_string(n) + " has type " + type(operands[n]).str()
          + ", expected " + input_types[n].str());
    if (this->region(operands[n]) != region)
      throw GraphError(op.str() + " operand from another region");
  }
  auto node = create_node(NodeKind::Simple, region);
  auto output_types = op.output_types();
  nodes_[node.index].operation = std::move(op);
  for (auto origin : operands)
    append_input(node, origin);
  for (auto & t : output_types)
    append_output(node, t);
  return node;
}

OriginId
Graph::add_import(std::string name, Type type)
{
  auto origin = insert_argument(root(), arguments(root()).size(), std::move(type));
  origins_[origin.index].name = std::move(name);
  return origin;
}

UserId
Graph::add_export(OriginId origin, std::string name)
{
  auto user = append_result(root(), origin, type(origin));
  users_[user.index].name = std::move(name);
  return user;
}

NodeId
Graph::add_gamma(RegionId region, OriginId predicate)
{
  const auto & t = type(predicate);
  if (!t.is_control() || t.alternatives() < 2)
    throw GraphError("γ predicate must be control(k) with k >= 2, got " + t.str());
  auto node = create_node(NodeKind::Gamma, region);
  append_input(node, predicate);
  for (unsigned n = 0; n < t.alternatives(); n++)
    create_region(node);
  return node;
}

EntryVar
Graph::add_entry_var(NodeId gamma, OriginId origin)
{
  require_kind(gamma, NodeKind::Gamma, "add_entry_var");
  EntryVar ev{ append_input(gamma, origin), {} };
  for (auto r : subregions(gamma))
    ev.arguments.push_back(insert_argument(r, arguments(r).size(), type(origin)));
  return ev;
}

ExitVar
Graph::add_exit_var(NodeId gamma, std::span<const OriginId> origins)
{
  require_kind(gamma, NodeKind::Gamma, "add_exit_var");
  const auto & regions = subregions(gamma);
  if (origins.size() != regions.size())
    throw GraphError("exit variable needs one origin per subregion");
  const auto & t = type(origins[0]);
  for (auto origin : origins)
  {
    if (type(origin) != t)
      throw GraphError("exit variable origins have different types");
  }
  ExitVar ex;
  for (std::size_t n = 0; n < regions.size(); n++)
    ex.results.push_back(append_result(regions[n], origins[n], t));
  ex.output = append_output(gamma, t);
  return ex;
}

NodeId
Graph::add_theta(RegionId region)
{
  auto node = create_node(NodeKind::Theta, region);
  auto body = create_region(node);
  append_result(body, OriginId(), Type::control(2));
  return node;
}

LoopVar
Graph::add_loop_var(NodeId theta, OriginId origin)
{
  require_kind(theta, NodeKind::Theta, "add_loop_var");
  auto body = subregion(theta);
  LoopVar lv;
  lv.input = append_input(theta, origin);
  lv.argument = insert_argument(body, arguments(body).size(), type(origin));
  lv.result = append_result(body, lv.argument, type(origin));
  lv.output = append_output(theta, type(origin));
  return lv;
}

void
Graph::set_predicate(NodeId theta, OriginId origin)
{
  require_kind(theta, NodeKind::Theta, "set_predicate");
  set_origin(result(subregion(theta), 0), origin);
}

NodeId
Graph::add_lambda(RegionId region, std::string name, FunctionSignature signature)
{
  auto node = create_node(NodeKind::Lambda, region);
  nodes_[node.index].name = std::move(name);
  auto body = create_region(node);
  for (const auto & p : signature.parameters)
    insert_argument(body, arguments(body).size(), p);
  insert_argument(body, arguments(body).size(), Type::memory_state());
  insert_argument(body, arguments(body).size(), Type::io_state());
  append_output(node, Type::function(std::move(signature)));
  return node;
}

void
Graph::set_lambda_results(NodeId lambda, std::span<const OriginId> origins)
{
  require_kind(lambda, NodeKind::Lambda, "set_lambda_results");
  auto body = subregion(lambda);
  if (!results(body).empty())
    throw GraphError("λ results already set");
  auto signature = lambda_signature(lambda);
  auto expected = signature.results;
  expected.push_back(Type::memory_state());
  expected.push_back(Type::io_state());
  if (origins.size() != expected.size())
    throw GraphError("λ " + name(lambda) + " expects " + std::to_string(expected.size())
                     + " results");
  for (std::size_t n = 0; n < origins.size(); n++)
    append_result(body, origins[n], expected[n]);
}

NodeId
Graph::add_delta(RegionId region, std::string name, Type type)
{
  auto node = create_node(NodeKind::Delta, region);
  nodes_[node.index].name = std::move(name);
  create_region(node);
  append_output(node, std::move(type));
  return node;
}

void
Graph::set_delta_result(NodeId delta, OriginId origin)
{
  require_kind(delta, NodeKind::Delta, "set_delta_result");
  auto body = subregion(delta);
  if (!results(body).empty())
    throw GraphError("δ result already set");
  append_result(body, origin, type(output(delta, 0)));
}

ContextVar
Graph::add_context_var(NodeId node, OriginId origin)
{
  auto k = kind(node);
  if (k != NodeKind::Lambda && k != NodeKind::Delta && k != NodeKind::Phi)
    throw GraphError("context variables exist only on λ, δ and φ nodes");
  auto position = inputs(node).size();
  ContextVar cv;
  cv.input = append_input(node, origin);
  cv.argument = insert_argument(subregion(node), position, type(origin));
  return cv;
}

NodeId
Graph::add_phi(RegionId region)
{
  auto node = create_node(NodeKind::Phi, region);
  create_region(node);
  return node;
}

RecursionVar
Graph::add_recursion_var(NodeId phi, Type type, std::string name)
{
  require_kind(phi, NodeKind::Phi, "add_recursion_var");
  auto body = subregion(phi);
  RecursionVar rv;
  rv.argument = insert_argument(body, arguments(body).size(), type);
  origins_[rv.argument.index].name = name;
  rv.result = append_result(body, OriginId(), type);
  rv.output = append_output(phi, type);
  origins_[rv.output.index].name = std::move(name);
  return rv;
}

void
Graph::set_recursion_result(NodeId phi, std::size_t n, OriginId origin)
{
  require_kind(phi, NodeKind::Phi, "set_recursion_result");
  set_origin(result(subregion(phi), n), origin);
}

void
Graph::set_origin(UserId user, OriginId origin)
{
  const auto & u = users_[user.index];
  if (origins_[origin.index].region != u.region)
    throw GraphError("edge crosses region boundary");
  if (origins_[origin.index].type != u.type)
    throw GraphError("type mismatch: origin " + type(origin).str() + " vs user " + u.type.str());
  disconnect(user);
  connect(user, origin);
}

std::size_t
Graph::divert_users(OriginId from, OriginId to)
{
  if (from == to)
    return 0;
  if (region(from) != region(to))
    throw GraphError("cannot divert users across regions");
  if (type(from) != type(to))
    throw GraphError("cannot divert users between types " + type(from).str() + " and "
                     + type(to).str());
  auto moved = users(from);
  for (auto user : moved)
    set_origin(user, to);
  return moved.size();
}

void
Graph::remove_region_contents(RegionId region)
{
  auto & data = regions_[region.index];
  for (std::size_t n = 0; n < data.results.size(); n++)
    disconnect(data.results[n]);
  auto nodes = data.nodes;
  for (auto node : nodes)
  {
    for (auto user : nodes_[node.index].inputs)
      disconnect(user);
    for (auto sub : nodes_[node.index].subregions)
      remove_region_contents(sub);
    nodes_[node.index].alive = false;
  }
  regions_[region.index].nodes.clear();
  regions_[region.index].alive = false;
}

void
Graph::remove_node(NodeId node)
{
  if (node == omega())
    throw GraphError("cannot remove the ω-node");
  if (!is_alive(node))
    throw GraphError("node " + std::to_string(node.index) + " already removed");
  for (auto origin : outputs(node))
    require_unused(origin, "node output");
  for (auto user : inputs(node))
    disconnect(user);
  for (auto sub : subregions(node))
    remove_region_contents(sub);
  nodes_[node.index].alive = false;
  regions_[parent(node).index].nodes.erase(node);
}

void
Graph::remove_entry_var(NodeId gamma, std::size_t n)
{
  require_kind(gamma, NodeKind::Gamma, "remove_entry_var");
  for (auto r : subregions(gamma))
    require_unused(argument(r, n), "entry variable argument");
  for (auto r : subregions(gamma))
    erase_argument(r, n);
  erase_input(gamma, n + 1);
}

void
Graph::remove_exit_var(NodeId gamma, std::size_t n)
{
  require_kind(gamma, NodeKind::Gamma, "remove_exit_var");
  require_unused(output(gamma, n), "exit variable output");
  for (auto r : subregions(gamma))
    erase_result(r, n);
  erase_output(gamma, n);
}

void
Graph::remove_loop_var(NodeId theta, std::size_t n)
{
  require_kind(theta, NodeKind::Theta, "remove_loop_var");
  auto body = subregion(theta);
  require_unused(output(theta, n), "loop variable output");
  auto arg = argument(body, n);
  auto res = result(body, n + 1);
  for (auto user : users(arg))
  {
    if (user != res)
      throw GraphError("loop variable argument still in use");
  }
  erase_result(body, n + 1);
  erase_argument(body, n);
  erase_output(theta, n);
  erase_input(theta, n);
}

void
Graph::remove_context_var(NodeId node, std::size_t n)
{
  if (n >= num_context_vars(node))
    throw GraphError("context variable index out of range");
  erase_argument(subregion(node), n);
  erase_input(node, n);
}

void
Graph::remove_recursion_var(NodeId phi, std::size_t n)
{
  require_kind(phi, NodeKind::Phi, "remove_recursion_var");
  auto body = subregion(phi);
  require_unused(output(phi, n), "recursion variable output");
  erase_result(body, n);
  erase_argument(body, num_context_vars(phi) + n);
  erase_output(phi, n);
}

void
Graph::remove_import(std::size_t n)
{
  erase_argument(root(), n);
}

void
Graph::remove_export(std::size_t n)
{
  erase_result(root(), n);
}

std::vector<NodeId>
Graph::topological_order(RegionId region) const
{
  const auto & members = nodes(region);
  std::unordered_map<NodeId, std::size_t> pending;
  std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
  for (auto node : members)
  {
    std::size_t count = 0;
    for (auto user : inputs(node))
    {
      auto o = origin(user);
      if (o.valid() && !is_argument(o))
        count++;
    }
    pending[node] = count;
    if (count == 0)
      ready.push(node);
  }

  std::vector<NodeId> order;
  order.reserve(members.size());
  while (!ready.empty())
  {
    auto node = ready.top();
    ready.pop();
    order.push_back(node);
    for (auto out : outputs(node))
    {
      for (auto user : users(out))
      {
        auto next = consumer(user);
        if (next.valid() && --pending[next] == 0)
          ready.push(next);
      }
    }
  }
  if (order.size() != members.size())
    throw GraphError("cycle in region " + std::to_string(region.index));
  return order;
}

void
Graph::walk(RegionId region, const std::function<void(NodeId)> & visit) const
{
  for (auto node : nodes(region))
  {
    visit(node);
    for (auto sub : subregions(node))
      walk(sub, visit);
  }
}

std::size_t
Graph::num_nodes() const
{
  std::size_t count = 0;
  walk(
      root(),
      [&](NodeId)
      {
        count++;
      });
  return count;
}

std::size_t
Graph::num_nodes(NodeKind k) const
{
  std::size_t count = 0;
  walk(
      root(),
      [&](NodeId node)
      {
        if (kind(node) == k)
          count++;
      });
  return count;
}

OriginId
Graph::lookup(const SubstitutionMap & smap, OriginId origin)
{
  auto it = smap.find(origin);
  if (it == smap.end())
    throw InvariantError("origin " + std::to_string(origin.index) + " missing in substitution");
  return it->second;
}

NodeId
Graph::copy_node(NodeId node, RegionId target, SubstitutionMap & smap)
{
  std::vector<OriginId> operands;
  for (auto user : inputs(node))
    operands.push_back(lookup(smap, origin(user)));

  NodeId copy;
  auto map_arguments = [&](RegionId from, RegionId to)
  {
    for (std::size_t n = 0; n < arguments(from).size(); n++)
      smap[argument(from, n)] = argument(to, n);
  };
  auto mapped_result = [&](RegionId r, std::size_t n)
  {
    return lookup(smap, origin(result(r, n)));
  };

  switch (kind(node))
  {
  case NodeKind::Simple:
    copy = add_simple(target, operation(node), operands);
    break;
  case NodeKind::Gamma:
  {
    copy = add_gamma(target, operands[0]);
    for (std::size_t n = 1; n < operands.size(); n++)
      add_entry_var(copy, operands[n]);
    auto count = subregions(node).size();
    for (std::size_t r = 0; r < count; r++)
    {
      map_arguments(subregion(node, r), subregion(copy, r));
      copy_region_nodes(subregion(node, r), subregion(copy, r), smap);
    }
    for (std::size_t n = 0; n < outputs(node).size(); n++)
    {
      std::vector<OriginId> origins;
      for (std::size_t r = 0; r < count; r++)
        origins.push_back(mapped_result(subregion(node, r), n));
      add_exit_var(copy, origins);
    }
    break;
  }
  case NodeKind::Theta:
  {
    copy = add_theta(target);
    for (auto o : operands)
      add_loop_var(copy, o);
    auto from = subregion(node);
    auto to = subregion(copy);
    map_arguments(from, to);
    copy_region_nodes(from, to, smap);
    for (std::size_t n = 0; n < results(from).size(); n++)
      set_origin(result(to, n), mapped_result(from, n));
    break;
  }
  case NodeKind::Lambda:
  {
    copy = add_lambda(target, name(node), lambda_signature(node));
    for (auto o : operands)
      add_context_var(copy, o);
    map_arguments(subregion(node), subregion(copy));
    copy_region_nodes(subregion(node), subregion(copy), smap);
    std::vector<OriginId> origins;
    for (std::size_t n = 0; n < results(subregion(node)).size(); n++)
      origins.push_back(mapped_result(subregion(node), n));
    set_lambda_results(copy, origins);
    break;
  }
  case NodeKind::Delta:
  {
    copy = add_delta(target, name(node), type(output(node, 0)));
    for (auto o : operands)
      add_context_var(copy, o);
    map_arguments(subregion(node), subregion(copy));
    copy_region_nodes(subregion(node), subregion(copy), smap);
    set_delta_result(copy, mapped_result(subregion(node), 0));
    break;
  }
  case NodeKind::Phi:
  {
    copy = add_phi(target);
    for (auto o : operands)
      add_context_var(copy, o);
    for (std::size_t n = 0; n < num_recursion_vars(node); n++)
      add_recursion_var(copy, type(output(node, n)), name(output(node, n)));
    map_arguments(subregion(node), subregion(copy));
    copy_region_nodes(subregion(node), subregion(copy), smap);
    for (std::size_t n = 0; n < num_recursion_vars(node); n++)
      set_recursion_result(copy, n, mapped_result(subregion(node), n));
    break;
  }
  case NodeKind::Omega:
    throw GraphError("cannot copy the ω-node");
  }

  for (std::size_t n = 0; n < outputs(node).size(); n++)
    smap[output(node, n)] = output(copy, n);
  return copy;
}

void
Graph::copy_region_nodes(RegionId source, RegionId target, SubstitutionMap & smap)
{
  for (auto node : topological_order(source))
    copy_node(node, target, smap);
}

namespace
{

std::string
describe(const Graph & graph, NodeId node)
{
  return "n" + std::to_string(node.index) + ":" + graph.label(node);
}

}

std::vector<std::string>
Graph::validate() const
{
  std::vector<std::string> violations;
  auto report = [&](std::string message)
  {
    violations.push_back(std::move(message));
  };

  auto check_user = [&](UserId user, const std::string & where)
  {
    const auto & u = users_[user.index];
    if (!u.origin.valid())
    {
      report(where + ": unbound origin");
      return;
    }
    const auto & o = origins_[u.origin.index];
    if (o.region != u.region)
      report(where + ": origin in a different region");
    if (o.type != u.type)
      report(where + ": type " + u.type.str() + " fed by " + o.type.str());
    if (o.node.valid() && !nodes_[o.node.index].alive)
      report(where + ": origin belongs to a removed node");
    if (std::find(o.users.begin(), o.users.end(), user) == o.users.end())
      report(where + ": missing from its origin's user list");
  };

  auto region_types = [&](RegionId r, bool use_arguments)
  {
    std::vector<Type> types;
    if (use_arguments)
    {
      for (auto a : arguments(r))
        types.push_back(type(a));
    }
    else
    {
      for (auto u : results(r))
        types.push_back(type(u));
    }
    return types;
  };

  auto type_list = [](const std::vector<Type> & types)
  {
    std::string s = "(";
    for (std::size_t n = 0; n < types.size(); n++)
      s += (n ? ", " : "") + types[n].str();
    return s + ")";
  };

  std::function<void(RegionId)> check_region = [&](RegionId r)
  {
    auto where = "region " + std::to_string(r.index);
    for (std::size_t n = 0; n < results(r).size(); n++)
    {
      auto user = result(r, n);
      if (index(user) != n || region(user) != r)
        report(where + ": result " + std::to_string(n) + " has stale bookkeeping");
      check_user(user, where + " result " + std::to_string(n));
    }
    for (std::size_t n = 0; n < arguments(r).size(); n++)
    {
      auto arg = argument(r, n);
      if (index(arg) != n || region(arg) != r)
        report(where + ": argument " + std::to_string(n) + " has stale bookkeeping");
    }

    try
    {
      (void)topological_order(r);
    }
    catch (const GraphError &)
    {
      report(where + ": dependency cycle");
    }

    for (auto node : nodes(r))
    {
      auto what = describe(*this, node);
      const auto & data = nodes_[node.index];
      if (!data.alive)
        report(what + ": removed node still listed");
      if (data.parent != r)
        report(what + ": parent mismatch");
      for (std::size_t n = 0; n < data.inputs.size(); n++)
      {
        auto user = data.inputs[n];
        if (index(user) != n || consumer(user) != node)
          report(what + ": input " + std::to_string(n) + " has stale bookkeeping");
        check_user(user, what + " input " + std::to_string(n));
      }
      for (std::size_t n = 0; n < data.outputs.size(); n++)
      {
        auto out = data.outputs[n];
        if (index(out) != n || producer(out) != node || region(out) != r)
          report(what + ": output " + std::to_string(n) + " has stale bookkeeping");
      }
      for (auto sub : data.subregions)
      {
        if (owner(sub) != node)
          report(what + ": subregion owner mismatch");
      }

      std::vector<Type> in_types;
      for (auto u : data.inputs)
        in_types.push_back(type(u));
      std::vector<Type> out_types;
      for (auto o : data.outputs)
        out_types.push_back(type(o));

      switch (data.kind)
      {
      case NodeKind::Simple:
      {
        if (!data.subregions.empty())
          report(what + ": simple node with subregions");
        if (in_types != data.operation->input_types())
          report(what + ": inputs " + type_list(in_types) + " do not match operation "
                 + data.operation->str());
        if (out_types != data.operation->output_types())
          report(what + ": outputs do not match operation " + data.operation->str());
        break;
      }
      case NodeKind::Gamma:
      {
        auto k = data.subregions.size();
        if (k < 2)
          report(what + ": needs at least two subregions");
        if (in_types.empty() || !in_types[0].is_control() || in_types[0].alternatives() != k)
        {
          report(what + ": predicate is not control(" + std::to_string(k) + ")");
          break;
        }
        std::vector<Type> ev_types(in_types.begin() + 1, in_types.end());
        for (std::size_t s = 0; s < k; s++)
        {
          auto sub = data.subregions[s];
          if (region_types(sub, true) != ev_types)
            report(what + ": subregion " + std::to_string(s) + " arguments "
                   + type_list(region_types(sub, true)) + " do not match entry variables "
                   + type_list(ev_types));
          if (region_types(sub, false) != out_types)
            report(what + ": subregion " + std::to_string(s) + " results "
                   + type_list(region_types(sub, false)) + " do not match exit variables "
                   + type_list(out_types));
        }
        break;
      }
      case NodeKind::Theta:
      {
        if (data.subregions.size() != 1)
        {
          report(what + ": needs exactly one subregion");
          break;
        }
        auto body = data.subregions[0];
        auto res = region_types(body, false);
        if (res.empty() || res[0] != Type::control(2))
        {
          report(what + ": result 0 is not control(2)");
          break;
        }
        res.erase(res.begin());
        if (in_types != out_types || region_types(body, true) != in_types || res != in_types)
          report(what + ": loop variable signatures differ");
        break;
      }
      case NodeKind::Lambda:
      {
        if (data.subregions.size() != 1 || data.outputs.size() != 1
            || !out_types[0].is_function())
        {
          report(what + ": malformed λ shell");
          break;
        }
        const auto & sig = out_types[0].signature();
        auto expected_args = in_types;
        expected_args.insert(expected_args.end(), sig.parameters.begin(), sig.parameters.end());
        expected_args.push_back(Type::memory_state());
        expected_args.push_back(Type::io_state());
        auto expected_results = sig.results;
        expected_results.push_back(Type::memory_state());
        expected_results.push_back(Type::io_state());
        if (region_types(data.subregions[0], true) != expected_args)
          report(what + ": arguments " + type_list(region_types(data.subregions[0], true))
                 + " do not match context variables and parameters "
                 + type_list(expected_args));
        if (region_types(data.subregions[0], false) != expected_results)
          report(what + ": results do not match the signature");
        break;
      }
      case NodeKind::Delta:
      {
        if (data.subregions.size() != 1 || data.outputs.size() != 1)
        {
          report(what + ": malformed δ shell");
          break;
        }
        if (region_types(data.subregions[0], true) != in_types)
          report(what + ": arguments do not match context variables");
        auto res = region_types(data.subregions[0], false);
        if (res.size() != 1 || res[0] != out_types[0])
          report(what + ": needs exactly one result of the output type");
        break;
      }
      case NodeKind::Phi:
      {
        if (data.subregions.size() != 1)
        {
          report(what + ": needs exactly one subregion");
          break;
        }
        auto body = data.subregions[0];
        auto expected_args = in_types;
        expected_args.insert(expected_args.end(), out_types.begin(), out_types.end());
        if (region_types(body, true) != expected_args)
          report(what + ": arguments do not match context and recursion variables");
        if (region_types(body, false) != out_types)
          report(what + ": results do not match recursion variables");
        for (auto inner : nodes(body))
        {
          if (kind(inner) != NodeKind::Lambda && kind(inner) != NodeKind::Delta)
            report(what + ": contains " + describe(*this, inner));
        }
        break;
      }
      case NodeKind::Omega:
        report(what + ": ω-node below the root");
        break;
      }

      for (auto sub : data.subregions)
        check_region(sub);
    }
  };

  const auto & omega_data = nodes_[omega().index];
  if (!omega_data.inputs.empty() || !omega_data.outputs.empty()
      || omega_data.subregions.size() != 1)
    report("ω-node must have no ports and exactly one region");
  check_region(root());
  return violations;
}

}
