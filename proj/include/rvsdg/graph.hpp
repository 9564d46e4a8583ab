#ifndef RVSDG_GRAPH_HPP
#define RVSDG_GRAPH_HPP

#include <rvsdg/operation.hpp>
#include <rvsdg/type.hpp>

#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace rvsdg
{

template<typename Tag>
struct Handle
{
  static constexpr std::uint32_t none = std::numeric_limits<std::uint32_t>::max();

  std::uint32_t index = none;

  constexpr Handle() = default;

  constexpr explicit Handle(std::uint32_t i)
      : index(i)
  {}

  [[nodiscard]] constexpr bool
  valid() const noexcept
  {
    return index != none;
  }

  constexpr auto
  operator<=>(const Handle &) const = default;
};

using NodeId = Handle<struct NodeTag>;
using RegionId = Handle<struct RegionTag>;
/// Node output or region argument.
using OriginId = Handle<struct OriginTag>;
/// Node input or region result.
using UserId = Handle<struct UserTag>;

}

template<typename Tag>
struct std::hash<rvsdg::Handle<Tag>>
{
  std::size_t
  operator()(const rvsdg::Handle<Tag> & handle) const noexcept
  {
    return std::hash<std::uint32_t>()(handle.index);
  }
};

namespace rvsdg
{

enum class NodeKind : std::uint8_t
{
  Simple,
  Gamma,
  Theta,
  Lambda,
  Delta,
  Phi,
  Omega
};

std::string_view
node_kind_name(NodeKind kind) noexcept;

struct EntryVar
{
  UserId input;
  std::vector<OriginId> arguments;
};

struct ExitVar
{
  std::vector<UserId> results;
  OriginId output;
};

struct LoopVar
{
  UserId input;
  OriginId argument;
  UserId result;
  OriginId output;
};

struct ContextVar
{
  UserId input;
  OriginId argument;
};

struct RecursionVar
{
  UserId result;
  OriginId argument;
  OriginId output;
};

using SubstitutionMap = std::unordered_map<OriginId, OriginId>;

/**
 * A complete RVSDG rooted in an ω-node.
 *
 * Entities are addressed by dense handles that are never reused; removed entities stay allocated
 * but are flagged dead. Edges live on the user side only: every input and result records its
 * origin, and every origin keeps the list of its users.
 *
 * Structural nodes are built incrementally. Port groups belonging to one variable (e.g. the input,
 * argument, result and output of a loop variable) are added and removed together, so the index
 * arithmetic of the variable views always holds.
 *
 * λ regions take their context variables first, then the parameters, then the memory and io
 * states; their results are the function results followed by both states.
 */
class Graph
{
public:
  Graph();

  [[nodiscard]] NodeId
  omega() const noexcept
  {
    return NodeId(0);
  }

  [[nodiscard]] RegionId
  root() const noexcept
  {
    return RegionId(0);
  }

  // nodes

  [[nodiscard]] NodeKind
  kind(NodeId node) const
  {
    return nodes_[node.index].kind;
  }

  [[nodiscard]] bool
  is_alive(NodeId node) const
  {
    return nodes_[node.index].alive;
  }

  [[nodiscard]] bool
  is_simple(NodeId node) const
  {
    return kind(node) == NodeKind::Simple;
  }

  [[nodiscard]] const Operation &
  operation(NodeId node) const;

  [[nodiscard]] RegionId
  parent(NodeId node) const
  {
    return nodes_[node.index].parent;
  }

  [[nodiscard]] const std::vector<RegionId> &
  subregions(NodeId node) const
  {
    return nodes_[node.index].subregions;
  }

  [[nodiscard]] RegionId
  subregion(NodeId node, std::size_t n = 0) const
  {
    return nodes_[node.index].subregions.at(n);
  }

  [[nodiscard]] const std::vector<UserId> &
  inputs(NodeId node) const
  {
    return nodes_[node.index].inputs;
  }

  [[nodiscard]] const std::vector<OriginId> &
  outputs(NodeId node) const
  {
    return nodes_[node.index].outputs;
  }

  [[nodiscard]] UserId
  input(NodeId node, std::size_t n) const
  {
    return nodes_[node.index].inputs.at(n);
  }

  [[nodiscard]] OriginId
  output(NodeId node, std::size_t n) const
  {
    return nodes_[node.index].outputs.at(n);
  }

  [[nodiscard]] const std::string &
  name(NodeId node) const
  {
    return nodes_[node.index].name;
  }

  void
  set_name(NodeId node, std::string name)
  {
    nodes_[node.index].name = std::move(name);
  }

  /// Label used in dumps and DOT output, e.g. "add" or "gamma".
  [[nodiscard]] std::string
  label(NodeId node) const;

  // regions

  [[nodiscard]] NodeId
  owner(RegionId region) const
  {
    return regions_[region.index].owner;
  }

  [[nodiscard]] const std::vector<OriginId> &
  arguments(RegionId region) const
  {
    return regions_[region.index].arguments;
  }

  [[nodiscard]] const std::vector<UserId> &
  results(RegionId region) const
  {
    return regions_[region.index].results;
  }

  [[nodiscard]] OriginId
  argument(RegionId region, std::size_t n) const
  {
    return regions_[region.index].arguments.at(n);
  }

  [[nodiscard]] UserId
  result(RegionId region, std::size_t n) const
  {
    return regions_[region.index].results.at(n);
  }

  /// Nodes of the region in ascending id order.
  [[nodiscard]] const std::set<NodeId> &
  nodes(RegionId region) const
  {
    return regions_[region.index].nodes;
  }

  /// Number of structural nodes between \p region and the root region.
  [[nodiscard]] std::size_t
  depth(RegionId region) const;

  /// True if \p inner is \p outer or nested inside it.
  [[nodiscard]] bool
  is_within(RegionId inner, RegionId outer) const;

  // ports

  [[nodiscard]] const Type &
  type(OriginId origin) const
  {
    return origins_[origin.index].type;
  }

  [[nodiscard]] const Type &
  type(UserId user) const
  {
    return users_[user.index].type;
  }

  [[nodiscard]] RegionId
  region(OriginId origin) const
  {
    return origins_[origin.index].region;
  }

  [[nodiscard]] RegionId
  region(UserId user) const
  {
    return users_[user.index].region;
  }

  /// Node owning the output, or an invalid handle for a region argument.
  [[nodiscard]] NodeId
  producer(OriginId origin) const
  {
    return origins_[origin.index].node;
  }

  /// Node owning the input, or an invalid handle for a region result.
  [[nodiscard]] NodeId
  consumer(UserId user) const
  {
    return users_[user.index].node;
  }

  [[nodiscard]] bool
  is_argument(OriginId origin) const
  {
    return !producer(origin).valid();
  }

  [[nodiscard]] bool
  is_result(UserId user) const
  {
    return !consumer(user).valid();
  }

  [[nodiscard]] std::size_t
  index(OriginId origin) const
  {
    return origins_[origin.index].index;
  }

  [[nodiscard]] std::size_t
  index(UserId user) const
  {
    return users_[user.index].index;
  }

  [[nodiscard]] OriginId
  origin(UserId user) const
  {
    return users_[user.index].origin;
  }

  [[nodiscard]] const std::vector<UserId> &
  users(OriginId origin) const
  {
    return origins_[origin.index].users;
  }

  [[nodiscard]] const std::string &
  name(OriginId origin) const
  {
    return origins_[origin.index].name;
  }

  [[nodiscard]] const std::string &
  name(UserId user) const
  {
    return users_[user.index].name;
  }

  /// Node input bound to a region argument (γ entry, θ loop or context variable), if any.
  [[nodiscard]] UserId
  structural_input(OriginId argument) const;

  /// Node output bound to a region result (γ exit, θ loop or recursion variable), if any.
  [[nodiscard]] OriginId
  structural_output(UserId result) const;

  /// Region arguments fed by a structural input (one per γ subregion).
  [[nodiscard]] std::vector<OriginId>
  bound_arguments(UserId input) const;

  // variable views

  [[nodiscard]] std::size_t
  num_entry_vars(NodeId gamma) const
  {
    return inputs(gamma).size() - 1;
  }

  [[nodiscard]] std::size_t
  num_exit_vars(NodeId gamma) const
  {
    return outputs(gamma).size();
  }

  [[nodiscard]] std::size_t
  num_loop_vars(NodeId theta) const
  {
    return inputs(theta).size();
  }

  [[nodiscard]] std::size_t
  num_context_vars(NodeId node) const
  {
    return inputs(node).size();
  }

  [[nodiscard]] std::size_t
  num_recursion_vars(NodeId phi) const
  {
    return outputs(phi).size();
  }

  [[nodiscard]] EntryVar
  entry_var(NodeId gamma, std::size_t n) const;

  [[nodiscard]] ExitVar
  exit_var(NodeId gamma, std::size_t n) const;

  [[nodiscard]] LoopVar
  loop_var(NodeId theta, std::size_t n) const;

  [[nodiscard]] ContextVar
  context_var(NodeId node, std::size_t n) const;

  [[nodiscard]] RecursionVar
  recursion_var(NodeId phi, std::size_t n) const;

  /// γ predicate input or θ predicate result.
  [[nodiscard]] UserId
  predicate(NodeId node) const;

  [[nodiscard]] const FunctionSignature &
  lambda_signature(NodeId lambda) const
  {
    return type(output(lambda, 0)).signature();
  }

  /// Region argument holding parameter \p n of a λ.
  [[nodiscard]] OriginId
  lambda_parameter(NodeId lambda, std::size_t n) const
  {
    return argument(subregion(lambda), num_context_vars(lambda) + n);
  }

  // construction

  NodeId
  add_simple(RegionId region, Operation op, std::span<const OriginId> operands);

  NodeId
  add_simple(RegionId region, Operation op, std::initializer_list<OriginId> operands)
  {
    return add_simple(region, std::move(op), std::span<const OriginId>(operands));
  }

  /// Adds an ω-region argument naming an external entity.
  OriginId
  add_import(std::string name, Type type);

  /// Adds an ω-region result exporting \p origin under \p name.
  UserId
  add_export(OriginId origin, std::string name);

  NodeId
  add_gamma(RegionId region, OriginId predicate);

  EntryVar
  add_entry_var(NodeId gamma, OriginId origin);

  ExitVar
  add_exit_var(NodeId gamma, std::span<const OriginId> origins);

  NodeId
  add_theta(RegionId region);

  /// The new loop variable's result initially passes its argument through.
  LoopVar
  add_loop_var(NodeId theta, OriginId origin);

  void
  set_predicate(NodeId theta, OriginId origin);

  NodeId
  add_lambda(RegionId region, std::string name, FunctionSignature signature);

  /// Binds the λ results: function results followed by the memory and io states.
  void
  set_lambda_results(NodeId lambda, std::span<const OriginId> origins);

  NodeId
  add_delta(RegionId region, std::string name, Type type);

  void
  set_delta_result(NodeId delta, OriginId origin);

  /// Adds a context variable to a λ, δ or φ; its argument precedes all other arguments but the
  /// existing context variables.
  ContextVar
  add_context_var(NodeId node, OriginId origin);

  NodeId
  add_phi(RegionId region);

  /// The new recursion variable's result stays unbound until set_recursion_result.
  RecursionVar
  add_recursion_var(NodeId phi, Type type, std::string name);

  void
  set_recursion_result(NodeId phi, std::size_t n, OriginId origin);

  void
  set_origin(UserId user, OriginId origin);

  /// Moves every user of \p from to \p to and returns the number of moved users.
  std::size_t
  divert_users(OriginId from, OriginId to);

  // removal; removed origins must not have users

  void
  remove_node(NodeId node);

  void
  remove_entry_var(NodeId gamma, std::size_t n);

  void
  remove_exit_var(NodeId gamma, std::size_t n);

  void
  remove_loop_var(NodeId theta, std::size_t n);

  void
  remove_context_var(NodeId node, std::size_t n);

  void
  remove_recursion_var(NodeId phi, std::size_t n);

  void
  remove_import(std::size_t n);

  void
  remove_export(std::size_t n);

  // traversal

  /// Nodes ordered after all their producers; ties go to the lowest id.
  [[nodiscard]] std::vector<NodeId>
  topological_order(RegionId region) const;

  /// Calls \p visit for every live node of \p region and all nested regions, parents first.
  void
  walk(RegionId region, const std::function<void(NodeId)> & visit) const;

  /// All structural-invariant violations; empty for a well-formed graph.
  [[nodiscard]] std::vector<std::string>
  validate() const;

  [[nodiscard]] std::size_t
  num_nodes() const;

  [[nodiscard]] std::size_t
  num_nodes(NodeKind kind) const;

  // copying

  /**
   * Copies \p node into \p target. Input origins are translated through \p smap and the copy's
   * outputs are recorded in it; structural nodes are copied with all their subregions.
   */
  NodeId
  copy_node(NodeId node, RegionId target, SubstitutionMap & smap);

  /**
   * Copies all nodes of \p source into \p target in topological order. \p smap must map the
   * arguments of \p source; on return it maps every origin of \p source.
   */
  void
  copy_region_nodes(RegionId source, RegionId target, SubstitutionMap & smap);

  /// Translates an origin through \p smap; throws if it is unmapped.
  static OriginId
  lookup(const SubstitutionMap & smap, OriginId origin);

private:
  struct NodeData
  {
    NodeKind kind = NodeKind::Simple;
    bool alive = true;
    RegionId parent;
    std::vector<UserId> inputs;
    std::vector<OriginId> outputs;
    std::vector<RegionId> subregions;
    std::optional<Operation> operation;
    std::string name;
  };

  struct RegionData
  {
    NodeId owner;
    bool alive = true;
    std::vector<OriginId> arguments;
    std::vector<UserId> results;
    std::set<NodeId> nodes;
  };

  struct OriginData
  {
    Type type;
    RegionId region;
    NodeId node;
    std::size_t index = 0;
    std::vector<UserId> users;
    std::string name;
  };

  struct UserData
  {
    Type type;
    RegionId region;
    NodeId node;
    std::size_t index = 0;
    OriginId origin;
    std::string name;
  };

  NodeId
  create_node(NodeKind kind, RegionId parent);

  RegionId
  create_region(NodeId owner);

  OriginId
  create_origin(Type type, RegionId region, NodeId node, std::size_t index);

  UserId
  create_user(Type type, RegionId region, NodeId node, std::size_t index);

  UserId
  append_input(NodeId node, OriginId origin);

  OriginId
  append_output(NodeId node, Type type);

  OriginId
  insert_argument(RegionId region, std::size_t position, Type type);

  UserId
  append_result(RegionId region, OriginId origin, Type type);

  void
  connect(UserId user, OriginId origin);

  void
  disconnect(UserId user);

  void
  erase_input(NodeId node, std::size_t n);

  void
  erase_output(NodeId node, std::size_t n);

  void
  erase_argument(RegionId region, std::size_t n);

  void
  erase_result(RegionId region, std::size_t n);

  void
  remove_region_contents(RegionId region);

  void
  require_kind(NodeId node, NodeKind kind, const char * what) const;

  void
  require_unused(OriginId origin, const char * what) const;

  std::vector<NodeData> nodes_;
  std::vector<RegionData> regions_;
  std::vector<OriginData> origins_;
  std::vector<UserData> users_;
};

}

#endif
