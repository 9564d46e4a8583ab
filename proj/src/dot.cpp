#include <rvsdg/construction.hpp>
#include <rvsdg/dump.hpp>

#include <sstream>

namespace rvsdg
{

namespace
{

std::string
escape(std::string_view text)
{
  std::string out;
  for (char c : text)
  {
    if (c == '"' || c == '\\')
      out += '\\';
    out += c;
  }
  return out;
}

/// Printed instruction lines of each block, taken from the entity's canonical text.
std::vector<std::vector<std::string>>
block_lines(const ir::Entity & entity)
{
  std::vector<std::vector<std::string>> lines(entity.blocks.size());
  std::istringstream in(ir::print(entity));
  std::string line;
  std::getline(in, line);
  std::size_t block = 0;
  bool started = false;
  while (std::getline(in, line))
  {
    if (line.empty() || line == "}")
      continue;
    if (line[0] != ' ')
    {
      if (started)
        block++;
      started = true;
      continue;
    }
    lines[block].push_back(line.substr(2));
  }
  return lines;
}

std::string
set_text(const char * tag, const VariableSet & set)
{
  std::string s = std::string(tag) + "={";
  bool first = true;
  for (const auto & v : set)
  {
    if (!first)
      s += ",";
    s += v;
    first = false;
  }
  return s + "}";
}

void
tree_node(
    const ir::Entity & entity,
    const ControlTreeNode & node,
    const std::string & prefix,
    std::size_t & next,
    std::string & out)
{
  auto id = prefix + std::to_string(next++);
  std::string label;
  switch (node.kind)
  {
  case TreeKind::Block:
    label = "block " + entity.blocks[node.block].label;
    break;
  case TreeKind::Linear:
    label = "linear";
    break;
  case TreeKind::Branch:
    label = "branch " + entity.blocks[node.block].label;
    break;
  case TreeKind::Loop:
    label = "loop " + entity.blocks[node.block].label;
    break;
  }
  label += "\\n" + escape(set_text("R", node.reads)) + "\\n" + escape(set_text("W", node.writes)) + "\\n"
         + escape(set_text("D", node.demand));
  out += "    " + id + " [label=\"" + label + "\"];\n";
  for (const auto & child : node.children)
  {
    auto child_id = prefix + std::to_string(next);
    tree_node(entity, child, prefix, next, out);
    out += "    " + id + " -> " + child_id + ";\n";
  }
}

}

std::string
cfg_to_dot(const ir::Module & module)
{
  std::string out = "digraph cfg {\n  node [shape=box, fontname=\"monospace\"];\n";
  for (std::size_t e = 0; e < module.entities.size(); e++)
  {
    const auto & entity = module.entities[e];
    if (entity.external)
      continue;
    auto prefix = "e" + std::to_string(e) + "b";
    out += "  subgraph cluster_" + std::to_string(e) + " {\n    label=\"@" + escape(entity.name) + "\";\n";
    auto lines = block_lines(entity);
    for (std::size_t b = 0; b < entity.blocks.size(); b++)
    {
      auto label = escape(entity.blocks[b].label) + ":\\l";
      for (const auto & line : lines[b])
        label += escape(line) + "\\l";
      out += "    " + prefix + std::to_string(b) + " [label=\"" + label + "\"];\n";
    }
    for (std::size_t b = 0; b < entity.blocks.size(); b++)
    {
      const auto & targets = entity.blocks[b].terminator.targets;
      for (std::size_t t = 0; t < targets.size(); t++)
      {
        out += "    " + prefix + std::to_string(b) + " -> " + prefix + std::to_string(targets[t]);
        if (targets.size() > 1)
          out += " [label=\"" + std::to_string(t) + "\"]";
        out += ";\n";
      }
    }
    out += "  }\n";
  }
  return out + "}\n";
}

std::string
tree_to_dot(const ir::Module & module)
{
  std::string out = "digraph tree {\n  node [shape=box, fontname=\"monospace\"];\n";
  for (std::size_t e = 0; e < module.entities.size(); e++)
  {
    const auto & entity = module.entities[e];
    if (entity.external)
      continue;
    auto body = prepare_body(entity);
    auto tree = structural_analysis(body);
    annotate_demands(body, tree);
    out += "  subgraph cluster_" + std::to_string(e) + " {\n    label=\"@" + escape(entity.name) + "\";\n";
    std::size_t next = 0;
    tree_node(body, tree, "e" + std::to_string(e) + "t", next, out);
    out += "  }\n";
  }
  return out + "}\n";
}

}
