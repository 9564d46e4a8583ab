#include <rvsdg/construction.hpp>
#include <rvsdg/error.hpp>

#include <algorithm>
#include <functional>
#include <map>
#include <unordered_set>

namespace rvsdg
{

bool
is_pseudo_variable(const std::string & name) noexcept
{
  return !name.empty() && (name[0] == '!' || name[0] == '@');
}

namespace
{

struct Edge
{
  std::size_t block;
  std::size_t slot;

  auto
  operator<=>(const Edge &) const = default;
};

using BlockSet = std::set<std::size_t>;

ir::Terminator
jump_to(std::size_t target)
{
  ir::Terminator term;
  term.kind = ir::Terminator::Kind::Jump;
  term.targets = { target };
  return term;
}

ir::Terminator
branch_on(const std::string & variable, const Type & type, std::vector<std::size_t> targets)
{
  ir::Terminator term;
  term.kind = ir::Terminator::Kind::Branch;
  term.value = ir::Operand::variable(variable, type);
  term.targets = std::move(targets);
  return term;
}

ir::Instruction
assign(const std::string & variable, const Type & type, std::uint64_t value)
{
  ir::Instruction inst;
  inst.kind = ir::InstKind::Copy;
  inst.result = variable;
  inst.type = type;
  inst.operands.push_back(ir::Operand::literal(type, value));
  return inst;
}

struct Assignment
{
  std::string variable;
  Type type;
  std::uint64_t value;
};

/**
 * Graph view shared by restructuring and structural analysis: successors exclude the back edges
 * of loops that were already handled, and a handled loop is represented by its head whose only
 * successor edge is the exit edge of its tail.
 */
class CfgView
{
public:
  explicit CfgView(ir::Entity & entity)
      : entity_(entity)
  {}

  ir::Entity &
  entity()
  {
    return entity_;
  }

  std::size_t
  target(const Edge & edge) const
  {
    return entity_.blocks[edge.block].terminator.targets[edge.slot];
  }

  std::vector<Edge>
  edges(std::size_t block) const
  {
    std::vector<Edge> result;
    const auto & targets = entity_.blocks[block].terminator.targets;
    for (std::size_t slot = 0; slot < targets.size(); slot++)
    {
      if (!back_edges_.count({ block, slot }))
        result.push_back({ block, slot });
    }
    return result;
  }

  void
  add_back_edge(Edge edge)
  {
    back_edges_.insert(edge);
  }

  /// Strongly connected components of \p nodes with a cycle, members ascending, ordered by their
  /// smallest member.
  std::vector<BlockSet>
  cycles(const BlockSet & nodes) const
  {
    std::map<std::size_t, std::size_t> index;
    std::map<std::size_t, std::size_t> low;
    std::vector<std::size_t> stack;
    std::set<std::size_t> on_stack;
    std::vector<BlockSet> result;
    std::size_t counter = 0;

    std::function<void(std::size_t)> connect = [&](std::size_t v)
    {
      index[v] = low[v] = counter++;
      stack.push_back(v);
      on_stack.insert(v);
      for (auto e : edges(v))
      {
        auto w = target(e);
        if (!nodes.count(w))
          continue;
        if (!index.count(w))
        {
          connect(w);
          low[v] = std::min(low[v], low[w]);
        }
        else if (on_stack.count(w))
        {
          low[v] = std::min(low[v], index[w]);
        }
      }
      if (low[v] != index[v])
        return;
      BlockSet component;
      std::size_t w;
      do
      {
        w = stack.back();
        stack.pop_back();
        on_stack.erase(w);
        component.insert(w);
      } while (w != v);
      bool cyclic = component.size() > 1;
      if (!cyclic)
      {
        for (auto e : edges(v))
          cyclic |= target(e) == v;
      }
      if (cyclic)
        result.push_back(std::move(component));
    };

    for (auto v : nodes)
    {
      if (!index.count(v))
        connect(v);
    }
    std::sort(
        result.begin(),
        result.end(),
        [](const BlockSet & a, const BlockSet & b)
        {
          return *a.begin() < *b.begin();
        });
    return result;
  }

private:
  ir::Entity & entity_;
  std::set<Edge> back_edges_;
};

struct LoopShape
{
  std::size_t head;
  std::size_t tail;
  std::size_t repeat_slot;
  BlockSet body;
};

/// Abstract acyclic graph of one nesting level, where each loop is collapsed into its head.
class Level
{
public:
  Level(const CfgView & view, const std::vector<LoopShape> & loops)
      : view_(view)
  {
    for (const auto & loop : loops)
      tails_[loop.head] = loop.tail;
  }

  std::vector<Edge>
  edges(std::size_t node) const
  {
    if (auto it = tails_.find(node); it != tails_.end())
      return view_.edges(it->second);
    return view_.edges(node);
  }

  bool
  is_loop(std::size_t node) const
  {
    return tails_.count(node) != 0;
  }

  std::size_t
  tail(std::size_t node) const
  {
    return tails_.at(node);
  }

  /// Nodes of \p nodes reachable from \p start without passing through \p start again, in
  /// topological order.
  std::vector<std::size_t>
  reachable_order(std::size_t start, const BlockSet & nodes) const
  {
    std::vector<std::size_t> post;
    std::set<std::size_t> seen{ start };
    std::function<void(std::size_t)> visit = [&](std::size_t v)
    {
      for (auto e : edges(v))
      {
        auto w = view_.target(e);
        if (nodes.count(w) && seen.insert(w).second)
          visit(w);
      }
      post.push_back(v);
    };
    visit(start);
    post.pop_back();
    std::reverse(post.begin(), post.end());
    return post;
  }

  struct Split
  {
    std::vector<Edge> branches;
    std::map<std::size_t, std::size_t> owner;
    /// Nodes reached from more than one branch (or from outside \p nodes), in topological order;
    /// targets outside \p nodes follow.
    std::vector<std::size_t> continuations;
  };

  /// Partitions the nodes after a branching node into the parts owned by each branch edge.
  Split
  split(std::size_t node, const BlockSet & nodes) const
  {
    Split s;
    s.branches = edges(node);
    auto order = reachable_order(node, nodes);

    std::map<std::size_t, std::vector<std::optional<std::size_t>>> labels;
    for (std::size_t i = 0; i < s.branches.size(); i++)
      labels[view_.target(s.branches[i])].push_back(i);
    std::vector<std::size_t> outside;
    auto note_outside = [&](std::size_t target)
    {
      if (std::find(outside.begin(), outside.end(), target) == outside.end())
        outside.push_back(target);
    };
    for (std::size_t i = 0; i < s.branches.size(); i++)
    {
      if (!nodes.count(view_.target(s.branches[i])))
        note_outside(view_.target(s.branches[i]));
    }

    for (auto v : order)
    {
      const auto & incoming = labels[v];
      std::optional<std::size_t> common = incoming.empty() ? std::nullopt : incoming.front();
      for (const auto & label : incoming)
      {
        if (label != common)
          common.reset();
      }
      bool from_branch = std::any_of(
          incoming.begin(),
          incoming.end(),
          [](const auto & label)
          {
            return label.has_value();
          });
      std::optional<std::size_t> label;
      if (common)
        s.owner[v] = *common, label = common;
      else if (from_branch)
        s.continuations.push_back(v);
      for (auto e : edges(v))
      {
        auto w = view_.target(e);
        if (nodes.count(w))
          labels[w].push_back(label);
        else if (label)
          note_outside(w);
      }
    }
    s.continuations.insert(s.continuations.end(), outside.begin(), outside.end());
    return s;
  }

private:
  const CfgView & view_;
  std::map<std::size_t, std::size_t> tails_;
};

class Restructurer
{
public:
  Restructurer(ir::Entity & entity, RestructureStats & stats)
      : view_(entity),
        stats_(stats)
  {
    for (const auto & [name, type] : ir::variable_types(entity))
      variables_.insert(name);
    for (const auto & block : entity.blocks)
      labels_.insert(block.label);
  }

  void
  run()
  {
    make_exit_unique();
    BlockSet all;
    for (std::size_t b = 0; b < blocks().size(); b++)
      all.insert(b);
    process(0, all);
  }

private:
  std::vector<ir::BasicBlock> &
  blocks()
  {
    return view_.entity().blocks;
  }

  std::string
  fresh_variable(const std::string & base)
  {
    for (std::size_t n = 0;; n++)
    {
      auto candidate = base + std::to_string(n);
      if (variables_.insert(candidate).second)
        return candidate;
    }
  }

  std::size_t
  add_block(const std::string & base, ir::Terminator terminator)
  {
    std::string label;
    for (std::size_t n = 0;; n++)
    {
      label = base + std::to_string(n);
      if (labels_.insert(label).second)
        break;
    }
    ir::BasicBlock block;
    block.label = label;
    block.terminator = std::move(terminator);
    blocks().push_back(std::move(block));
    stats_.inserted_blocks++;
    return blocks().size() - 1;
  }

  /// Reroutes \p edge through a new block performing \p assignments and jumping to \p target.
  std::size_t
  split_edge(Edge edge, const std::vector<Assignment> & assignments, std::size_t target, const std::string & base)
  {
    auto block = add_block(base, jump_to(target));
    for (const auto & a : assignments)
      blocks()[block].instructions.push_back(assign(a.variable, a.type, a.value));
    blocks()[edge.block].terminator.targets[edge.slot] = block;
    return block;
  }

  void
  make_exit_unique()
  {
    auto & entity = view_.entity();
    auto return_type = entity.return_type();
    std::vector<std::size_t> returns;
    for (std::size_t b = 0; b < blocks().size(); b++)
    {
      if (blocks()[b].terminator.kind == ir::Terminator::Kind::Return)
        returns.push_back(b);
    }

    std::size_t exit;
    if (returns.size() == 1)
    {
      exit = returns[0];
    }
    else
    {
      ir::Terminator ret;
      std::string value;
      if (return_type)
      {
        value = fresh_variable("ret.");
        ret.value = ir::Operand::variable(value, *return_type);
      }
      exit = add_block("exit.", ret);
      if (returns.empty() && return_type)
      {
        ir::Instruction undef;
        undef.result = value;
        undef.type = *return_type;
        undef.op = Operation::undef(*return_type);
        blocks()[exit].instructions.push_back(std::move(undef));
      }
      for (auto b : returns)
      {
        auto & block = blocks()[b];
        if (return_type)
        {
          ir::Instruction copy;
          copy.kind = ir::InstKind::Copy;
          copy.result = value;
          copy.type = *return_type;
          copy.operands.push_back(*block.terminator.value);
          block.instructions.push_back(std::move(copy));
        }
        block.terminator = jump_to(exit);
      }
    }

    // Blocks that never reach the exit get a never-taken edge to it, so that every loop has an
    // exit and the return block post-dominates the body.
    while (true)
    {
      std::vector<std::vector<std::size_t>> preds(blocks().size());
      for (std::size_t b = 0; b < blocks().size(); b++)
      {
        for (auto s : ir::successors(blocks()[b]))
          preds[s].push_back(b);
      }
      std::vector<bool> reaches(blocks().size(), false);
      std::vector<std::size_t> work{ exit };
      reaches[exit] = true;
      while (!work.empty())
      {
        auto b = work.back();
        work.pop_back();
        for (auto p : preds[b])
        {
          if (!reaches[p])
            reaches[p] = true, work.push_back(p);
        }
      }
      auto stuck = std::find(reaches.begin(), reaches.end(), false);
      if (stuck == reaches.end())
        break;

      // pick a block of a sink component among the stuck blocks: follow successors until a block
      // repeats
      auto b = static_cast<std::size_t>(stuck - reaches.begin());
      std::set<std::size_t> visited;
      while (visited.insert(b).second)
        b = ir::successors(blocks()[b]).front();

      auto never = fresh_variable("never.");
      auto moved = add_block("stay.", blocks()[b].terminator);
      blocks()[b].terminator = branch_on(never, Type::integer(1), { moved, exit });
      stats_.predicates++;
    }
  }

  void
  process(std::size_t entry, BlockSet & nodes)
  {
    std::vector<LoopShape> loops;
    for (const auto & cycle : view_.cycles(nodes))
      loops.push_back(restructure_loop(cycle, nodes));
    for (auto & loop : loops)
    {
      process(loop.head, loop.body);
      nodes.insert(loop.body.begin(), loop.body.end());
    }

    Level level(view_, loops);
    BlockSet abstract;
    std::set<std::size_t> inside_loops;
    for (const auto & loop : loops)
      inside_loops.insert(loop.body.begin(), loop.body.end());
    for (auto b : nodes)
    {
      if (!inside_loops.count(b))
        abstract.insert(b);
    }
    for (const auto & loop : loops)
      abstract.insert(loop.head);
    restructure_acyclic(level, entry, abstract);
  }

  LoopShape
  restructure_loop(const BlockSet & cycle, BlockSet & nodes)
  {
    stats_.loops++;
    std::vector<Edge> entries;
    std::vector<std::size_t> heads;
    for (auto b : nodes)
    {
      if (cycle.count(b))
        continue;
      for (auto e : view_.edges(b))
      {
        if (cycle.count(view_.target(e)))
        {
          entries.push_back(e);
          if (std::find(heads.begin(), heads.end(), view_.target(e)) == heads.end())
            heads.push_back(view_.target(e));
        }
      }
    }
    if (heads.empty())
      throw InvariantError("loop without entry");

    std::vector<Edge> repeats;
    std::vector<Edge> exits;
    std::vector<std::size_t> exit_targets;
    for (auto b : cycle)
    {
      for (auto e : view_.edges(b))
      {
        auto t = view_.target(e);
        if (std::find(heads.begin(), heads.end(), t) != heads.end())
        {
          repeats.push_back(e);
        }
        else if (!cycle.count(t))
        {
          exits.push_back(e);
          if (std::find(exit_targets.begin(), exit_targets.end(), t) == exit_targets.end())
            exit_targets.push_back(t);
        }
      }
    }
    if (exits.empty())
      throw InvariantError("loop without exit");

    if (heads.size() == 1 && repeats.size() == 1 && exits.size() == 1
        && repeats[0].block == exits[0].block && view_.edges(repeats[0].block).size() == 2)
    {
      view_.add_back_edge(repeats[0]);
      return { heads[0], repeats[0].block, repeats[0].slot, cycle };
    }

    LoopShape loop;
    loop.body = cycle;
    auto index_of = [](const std::vector<std::size_t> & list, std::size_t value)
    {
      return static_cast<std::uint64_t>(std::find(list.begin(), list.end(), value) - list.begin());
    };

    std::string entry_selector;
    auto entry_type = Type::selector_for(static_cast<unsigned>(heads.size()));
    if (heads.size() > 1)
    {
      entry_selector = fresh_variable("q.");
      stats_.predicates++;
      loop.head = add_block("loop.head.", branch_on(entry_selector, entry_type, heads));
      loop.body.insert(loop.head);
    }
    else
    {
      loop.head = heads[0];
    }

    std::string exit_selector;
    auto exit_type = Type::selector_for(static_cast<unsigned>(exit_targets.size()));
    std::size_t exit;
    if (exit_targets.size() > 1)
    {
      exit_selector = fresh_variable("x.");
      stats_.predicates++;
      exit = add_block("loop.exit.", branch_on(exit_selector, exit_type, exit_targets));
      nodes.insert(exit);
    }
    else
    {
      exit = exit_targets[0];
    }

    auto repeat = fresh_variable("r.");
    stats_.predicates++;
    auto bit = Type::integer(1);
    loop.tail = add_block("loop.tail.", branch_on(repeat, bit, { exit, loop.head }));
    loop.repeat_slot = 1;
    loop.body.insert(loop.tail);

    if (heads.size() > 1)
    {
      for (auto e : entries)
      {
        auto value = index_of(heads, view_.target(e));
        nodes.insert(split_edge(e, { { entry_selector, entry_type, value } }, loop.head, "loop.entry."));
      }
    }
    for (auto e : repeats)
    {
      std::vector<Assignment> assignments{ { repeat, bit, 1 } };
      if (heads.size() > 1)
        assignments.push_back({ entry_selector, entry_type, index_of(heads, view_.target(e)) });
      loop.body.insert(split_edge(e, assignments, loop.tail, "loop.repeat."));
    }
    for (auto e : exits)
    {
      std::vector<Assignment> assignments{ { repeat, bit, 0 } };
      if (exit_targets.size() > 1)
        assignments.push_back({ exit_selector, exit_type, index_of(exit_targets, view_.target(e)) });
      loop.body.insert(split_edge(e, assignments, loop.tail, "loop.leave."));
    }
    view_.add_back_edge({ loop.tail, loop.repeat_slot });
    nodes.insert(loop.body.begin(), loop.body.end());
    return loop;
  }

  void
  restructure_acyclic(const Level & level, std::size_t entry, BlockSet & nodes)
  {
    auto current = entry;
    while (true)
    {
      auto out = level.edges(current);
      bool leaves = std::all_of(
          out.begin(),
          out.end(),
          [&](const Edge & e)
          {
            return !nodes.count(view_.target(e));
          });
      if (out.empty() || leaves)
        return;
      if (out.size() == 1)
      {
        current = view_.target(out[0]);
        continue;
      }

      auto split = level.split(current, nodes);
      const auto & conts = split.continuations;
      if (conts.empty())
        throw InvariantError("branch without continuation");
      std::vector<BlockSet> regions(split.branches.size());
      for (const auto & [node, owner] : split.owner)
        regions[owner].insert(node);

      std::size_t join;
      if (conts.size() == 1)
      {
        join = conts[0];
        for (std::size_t i = 0; i < split.branches.size(); i++)
        {
          if (view_.target(split.branches[i]) == join)
          {
            auto block = split_edge(split.branches[i], {}, join, "empty.");
            regions[i].insert(block);
            nodes.insert(block);
          }
        }
      }
      else
      {
        auto selector = fresh_variable("p.");
        auto type = Type::selector_for(static_cast<unsigned>(conts.size()));
        stats_.predicates++;
        join = add_block("join.", branch_on(selector, type, conts));
        nodes.insert(join);
        auto reroute = [&](Edge e, std::size_t region)
        {
          auto t = view_.target(e);
          auto it = std::find(conts.begin(), conts.end(), t);
          if (it == conts.end())
            return;
          auto value = static_cast<std::uint64_t>(it - conts.begin());
          auto block = split_edge(e, { { selector, type, value } }, join, "route.");
          regions[region].insert(block);
          nodes.insert(block);
        };
        for (std::size_t i = 0; i < split.branches.size(); i++)
          reroute(split.branches[i], i);
        for (const auto & [node, owner] : split.owner)
        {
          for (auto e : level.edges(node))
            reroute(e, owner);
        }
      }

      for (std::size_t i = 0; i < split.branches.size(); i++)
        restructure_acyclic(level, view_.target(split.branches[i]), regions[i]);

      if (!nodes.count(join))
        return;
      current = join;
    }
  }

  CfgView view_;
  RestructureStats & stats_;
  std::unordered_set<std::string> variables_;
  std::unordered_set<std::string> labels_;
};

class Analyzer
{
public:
  explicit Analyzer(ir::Entity & entity)
      : view_(entity)
  {}

  ControlTreeNode
  analyze(std::size_t entry, const BlockSet & nodes)
  {
    std::vector<LoopShape> loops;
    for (const auto & cycle : view_.cycles(nodes))
      loops.push_back(loop_shape(cycle, nodes));

    Level level(view_, loops);
    std::map<std::size_t, const LoopShape *> by_head;
    std::set<std::size_t> inside_loops;
    for (const auto & loop : loops)
    {
      by_head[loop.head] = &loop;
      inside_loops.insert(loop.body.begin(), loop.body.end());
    }
    BlockSet abstract;
    for (auto b : nodes)
    {
      if (!inside_loops.count(b))
        abstract.insert(b);
    }
    for (const auto & loop : loops)
      abstract.insert(loop.head);
    return analyze_acyclic(level, by_head, entry, abstract);
  }

private:
  LoopShape
  loop_shape(const BlockSet & cycle, const BlockSet & nodes)
  {
    std::set<std::size_t> heads;
    for (auto b : nodes)
    {
      if (cycle.count(b))
        continue;
      for (auto e : view_.edges(b))
      {
        if (cycle.count(view_.target(e)))
          heads.insert(view_.target(e));
      }
    }
    std::vector<Edge> repeats;
    std::vector<Edge> exits;
    for (auto b : cycle)
    {
      for (auto e : view_.edges(b))
      {
        if (heads.count(view_.target(e)))
          repeats.push_back(e);
        else if (!cycle.count(view_.target(e)))
          exits.push_back(e);
      }
    }
    if (heads.size() != 1 || repeats.size() != 1 || exits.size() != 1 || repeats[0].block != exits[0].block
        || view_.edges(repeats[0].block).size() != 2)
      throw InvariantError("loop at block '" + view_.entity().blocks[*cycle.begin()].label + "' is not tail-controlled");
    view_.add_back_edge(repeats[0]);
    return { *heads.begin(), repeats[0].block, repeats[0].slot, cycle };
  }

  ControlTreeNode
  analyze_acyclic(
      const Level & level,
      const std::map<std::size_t, const LoopShape *> & loops,
      std::size_t entry,
      const BlockSet & nodes)
  {
    std::vector<ControlTreeNode> parts;
    auto current = entry;
    while (true)
    {
      if (auto it = loops.find(current); it != loops.end())
      {
        ControlTreeNode loop;
        loop.kind = TreeKind::Loop;
        loop.block = it->second->tail;
        loop.repeat = it->second->repeat_slot;
        loop.children.push_back(analyze(current, it->second->body));
        parts.push_back(std::move(loop));
      }
      else
      {
        ControlTreeNode leaf;
        leaf.block = current;
        parts.push_back(std::move(leaf));
      }

      auto out = level.edges(current);
      bool leaves = std::all_of(
          out.begin(),
          out.end(),
          [&](const Edge & e)
          {
            return !nodes.count(view_.target(e));
          });
      if (out.empty() || leaves)
        break;
      if (out.size() == 1)
      {
        current = view_.target(out[0]);
        continue;
      }

      auto split = level.split(current, nodes);
      if (split.continuations.size() != 1)
        throw InvariantError("branch at block '" + view_.entity().blocks[current].label + "' has no unique join");
      auto join = split.continuations[0];
      ControlTreeNode branch;
      branch.kind = TreeKind::Branch;
      branch.block = current;
      for (std::size_t i = 0; i < split.branches.size(); i++)
      {
        auto target = view_.target(split.branches[i]);
        if (target == join)
          throw InvariantError("branch at block '" + view_.entity().blocks[current].label + "' has an empty alternative");
        BlockSet region;
        for (const auto & [node, owner] : split.owner)
        {
          if (owner == i)
            region.insert(node);
        }
        branch.children.push_back(analyze_acyclic(level, loops, target, region));
      }
      parts.push_back(std::move(branch));
      if (!nodes.count(join))
        break;
      current = join;
    }

    if (parts.size() == 1)
      return std::move(parts[0]);
    ControlTreeNode linear;
    linear.kind = TreeKind::Linear;
    linear.children = std::move(parts);
    return linear;
  }

  CfgView view_;
};

void
add_operand(const ir::Operand & o, VariableSet & reads)
{
  if (o.kind == ir::Operand::Kind::Variable)
    reads.insert(o.name);
  else if (o.kind == ir::Operand::Kind::Symbol)
    reads.insert("@" + o.name);
}

void
annotate_read_write(const ir::Entity & entity, ControlTreeNode & node, bool thread_io)
{
  for (auto & child : node.children)
    annotate_read_write(entity, child, thread_io);
  node.reads.clear();
  node.writes.clear();
  switch (node.kind)
  {
  case TreeKind::Block:
    block_effects(entity, node.block, node.reads, node.writes);
    break;
  case TreeKind::Linear:
    for (auto it = node.children.rbegin(); it != node.children.rend(); ++it)
    {
      for (const auto & w : it->writes)
        node.reads.erase(w);
      node.reads.insert(it->reads.begin(), it->reads.end());
      node.writes.insert(it->writes.begin(), it->writes.end());
    }
    break;
  case TreeKind::Branch:
    node.writes = node.children.front().writes;
    for (const auto & child : node.children)
    {
      node.reads.insert(child.reads.begin(), child.reads.end());
      VariableSet common;
      std::set_intersection(
          node.writes.begin(),
          node.writes.end(),
          child.writes.begin(),
          child.writes.end(),
          std::inserter(common, common.end()));
      node.writes = std::move(common);
    }
    break;
  case TreeKind::Loop:
    node.reads = node.children.front().reads;
    node.writes = node.children.front().writes;
    if (thread_io)
    {
      node.reads.insert(io_state_variable);
      node.writes.insert(io_state_variable);
    }
    break;
  }
}

VariableSet
transfer(const VariableSet & after, const VariableSet & writes, const VariableSet & reads)
{
  VariableSet result;
  std::set_difference(
      after.begin(),
      after.end(),
      writes.begin(),
      writes.end(),
      std::inserter(result, result.end()));
  result.insert(reads.begin(), reads.end());
  return result;
}

void
annotate_demand(ControlTreeNode & node, VariableSet & demand)
{
  node.demand_out = demand;
  switch (node.kind)
  {
  case TreeKind::Block:
    demand = transfer(demand, node.writes, node.reads);
    break;
  case TreeKind::Linear:
    for (auto it = node.children.rbegin(); it != node.children.rend(); ++it)
      annotate_demand(*it, demand);
    break;
  case TreeKind::Branch:
  {
    VariableSet combined;
    for (auto & child : node.children)
    {
      auto copy = node.demand_out;
      annotate_demand(child, copy);
      combined.insert(copy.begin(), copy.end());
    }
    demand = std::move(combined);
    break;
  }
  case TreeKind::Loop:
  {
    // loop variables cover everything the body demands at its start, including variables that a
    // nested loop carries but that are first defined inside this body
    demand.insert(node.reads.begin(), node.reads.end());
    for (;;)
    {
      auto inner = demand;
      annotate_demand(node.children.front(), inner);
      auto size = demand.size();
      demand.insert(inner.begin(), inner.end());
      if (demand.size() == size)
        break;
    }
    break;
  }
  }
  node.demand = demand;
}

void
print_set(std::string & out, const char * name, const VariableSet & set)
{
  out += " ";
  out += name;
  out += "={";
  bool first = true;
  for (const auto & v : set)
  {
    if (!first)
      out += ",";
    out += v;
    first = false;
  }
  out += "}";
}

void
print_node(std::string & out, const ir::Entity & entity, const ControlTreeNode & node, std::size_t depth)
{
  out += std::string(depth * 2, ' ');
  switch (node.kind)
  {
  case TreeKind::Block:
    out += "block " + entity.blocks[node.block].label;
    break;
  case TreeKind::Linear:
    out += "linear";
    break;
  case TreeKind::Branch:
    out += "branch " + entity.blocks[node.block].label;
    break;
  case TreeKind::Loop:
    out += "loop " + entity.blocks[node.block].label;
    break;
  }
  print_set(out, "R", node.reads);
  print_set(out, "W", node.writes);
  print_set(out, "D", node.demand);
  out += "\n";
  for (const auto & child : node.children)
    print_node(out, entity, child, depth + 1);
}

}

void
block_effects(const ir::Entity & entity, std::size_t block, VariableSet & reads, VariableSet & writes)
{
  reads.clear();
  writes.clear();
  const auto & b = entity.blocks[block];
  auto step = [&](const VariableSet & r, const VariableSet & w)
  {
    // instructions are visited bottom-up
    for (const auto & v : w)
      reads.erase(v);
    reads.insert(r.begin(), r.end());
    writes.insert(w.begin(), w.end());
  };

  VariableSet r;
  VariableSet w;
  if (b.terminator.value)
    add_operand(*b.terminator.value, r);
  if (b.terminator.kind == ir::Terminator::Kind::Return && entity.is_function())
  {
    r.insert(memory_state_variable);
    r.insert(io_state_variable);
  }
  step(r, w);

  for (auto it = b.instructions.rbegin(); it != b.instructions.rend(); ++it)
  {
    r.clear();
    w.clear();
    for (const auto & o : it->operands)
      add_operand(o, r);
    if (it->has_result())
      w.insert(it->result);
    if (it->kind == ir::InstKind::Call)
    {
      r.insert(memory_state_variable);
      r.insert(io_state_variable);
      w.insert(memory_state_variable);
      w.insert(io_state_variable);
    }
    else if (it->is_stateful())
    {
      r.insert(memory_state_variable);
      w.insert(memory_state_variable);
    }
    step(r, w);
  }
}

ir::Entity
restructure_control_flow(const ir::Entity & entity, RestructureStats * stats)
{
  RestructureStats local;
  auto result = entity;
  Restructurer(result, stats ? *stats : local).run();
  return result;
}

ControlTreeNode
structural_analysis(const ir::Entity & restructured)
{
  auto copy = restructured;
  BlockSet all;
  for (std::size_t b = 0; b < copy.blocks.size(); b++)
    all.insert(b);
  return Analyzer(copy).analyze(0, all);
}

void
annotate_demands(const ir::Entity & entity, ControlTreeNode & tree, bool thread_io)
{
  annotate_read_write(entity, tree, thread_io);
  VariableSet demand;
  annotate_demand(tree, demand);
}

std::string
print_tree(const ir::Entity & entity, const ControlTreeNode & tree)
{
  std::string out;
  print_node(out, entity, tree, 0);
  return out;
}

ir::Entity
prepare_body(const ir::Entity & entity, RestructureStats * stats)
{
  auto body = entity;
  ir::destruct_ssa(body);
  ir::remove_unreachable_blocks(body);
  return restructure_control_flow(body, stats);
}

}
