#include <rvsdg/dump.hpp>

#include <unordered_map>

namespace rvsdg
{

namespace
{

class Dumper
{
public:
  explicit Dumper(const Graph & graph)
      : graph_(graph)
  {}

  std::string
  run()
  {
    auto root = graph_.root();
    regions_[root] = next_region_++;
    for (auto arg : graph_.arguments(root))
      out_ += "import @" + graph_.name(arg) + " : " + graph_.type(arg).str() + "  ; " + name(arg) + "\n";
    nodes(root, 0);
    for (auto result : graph_.results(root))
      out_ += "export @" + graph_.name(result) + " = " + name(graph_.origin(result)) + "\n";
    return std::move(out_);
  }

private:
  std::string
  name(OriginId origin) const
  {
    if (graph_.is_argument(origin))
      return "r" + std::to_string(regions_.at(graph_.region(origin))) + "." + std::to_string(graph_.index(origin));
    return "n" + std::to_string(nodes_.at(graph_.producer(origin))) + "." + std::to_string(graph_.index(origin));
  }

  std::string
  origins(const std::vector<UserId> & users) const
  {
    std::string s = "(";
    for (std::size_t n = 0; n < users.size(); n++)
    {
      if (n)
        s += ", ";
      s += name(graph_.origin(users[n]));
    }
    return s + ")";
  }

  void
  nodes(RegionId region, std::size_t depth)
  {
    std::string indent(depth * 2, ' ');
    for (auto node : graph_.topological_order(region))
    {
      auto number = next_node_++;
      nodes_[node] = number;
      out_ += indent + "n" + std::to_string(number) + " = ";
      if (graph_.is_simple(node))
      {
        out_ += graph_.operation(node).str() + " " + origins(graph_.inputs(node)) + "\n";
        continue;
      }
      out_ += std::string(node_kind_name(graph_.kind(node)));
      if (!graph_.name(node).empty())
        out_ += " @" + graph_.name(node);
      out_ += " " + origins(graph_.inputs(node)) + " -> (";
      const auto & outs = graph_.outputs(node);
      for (std::size_t n = 0; n < outs.size(); n++)
        out_ += (n ? ", " : "") + graph_.type(outs[n]).str();
      out_ += ")\n";
      for (auto sub : graph_.subregions(node))
      {
        auto number_sub = next_region_++;
        regions_[sub] = number_sub;
        out_ += indent + "  region r" + std::to_string(number_sub) + " (";
        const auto & args = graph_.arguments(sub);
        for (std::size_t n = 0; n < args.size(); n++)
          out_ += (n ? ", " : "") + graph_.type(args[n]).str();
        out_ += ") {\n";
        nodes(sub, depth + 2);
        out_ += indent + "  } -> " + origins(graph_.results(sub)) + "\n";
      }
    }
  }

  const Graph & graph_;
  std::string out_;
  std::unordered_map<NodeId, std::size_t> nodes_;
  std::unordered_map<RegionId, std::size_t> regions_;
  std::size_t next_node_ = 0;
  std::size_t next_region_ = 0;
};

std::string
escape(const std::string & s)
{
  std::string r;
  for (char c : s)
  {
    if (c == '"' || c == '\\')
      r += '\\';
    r += c;
  }
  return r;
}

std::string
dot_port(const Graph & graph, OriginId origin)
{
  if (graph.is_argument(origin))
    return "a" + std::to_string(origin.index);
  return "n" + std::to_string(graph.producer(origin).index);
}

void
dot_region(const Graph & graph, RegionId region, std::string & out, std::size_t depth)
{
  std::string indent(depth * 2, ' ');
  for (auto arg : graph.arguments(region))
  {
    auto label = graph.name(arg).empty() ? "arg" + std::to_string(graph.index(arg)) : "@" + graph.name(arg);
    out += indent + "a" + std::to_string(arg.index) + " [shape=invhouse, label=\"" + escape(label) + " : "
           + escape(graph.type(arg).str()) + "\"];\n";
  }
  for (auto node : graph.topological_order(region))
  {
    auto id = "n" + std::to_string(node.index);
    auto label = id + ":" + graph.label(node);
    if (!graph.name(node).empty())
      label += " @" + graph.name(node);
    if (graph.is_simple(node))
    {
      out += indent + id + " [shape=box, label=\"" + escape(label) + "\"];\n";
    }
    else
    {
      out += indent + id + " [shape=box3d, label=\"" + escape(label) + "\"];\n";
      for (auto sub : graph.subregions(node))
      {
        out += indent + "subgraph cluster_r" + std::to_string(sub.index) + " {\n";
        out += indent + "  label=\"" + escape(label) + " r" + std::to_string(sub.index) + "\";\n";
        dot_region(graph, sub, out, depth + 1);
        out += indent + "}\n";
      }
    }
    for (auto input : graph.inputs(node))
    {
      auto origin = graph.origin(input);
      auto style = graph.type(origin).is_state() ? " [style=dashed, color=red]" : "";
      out += indent + dot_port(graph, origin) + " -> " + id + style + ";\n";
    }
  }
  for (auto result : graph.results(region))
  {
    auto rid = "res" + std::to_string(result.index);
    out += indent + rid + " [shape=house, label=\"res" + std::to_string(graph.index(result)) + "\"];\n";
    auto style = graph.type(result).is_state() ? " [style=dashed, color=red]" : "";
    out += indent + dot_port(graph, graph.origin(result)) + " -> " + rid + style + ";\n";
  }
}

void
count_region(const Graph & graph, RegionId region, std::size_t depth, std::map<std::string, std::size_t> & stats)
{
  stats["regions"]++;
  stats["depth"] = std::max(stats["depth"], depth);
  for (auto node : graph.nodes(region))
  {
    stats["nodes"]++;
    stats["nodes." + std::string(node_kind_name(graph.kind(node)))]++;
    if (graph.is_simple(node))
      stats["ops." + std::string(graph.operation(node).name())]++;
    for (auto sub : graph.subregions(node))
      count_region(graph, sub, depth + 1, stats);
  }
}

}

std::string
dump(const Graph & graph)
{
  return Dumper(graph).run();
}

std::string
to_dot(const Graph & graph)
{
  std::string out = "digraph rvsdg {\n  node [fontname=\"monospace\"];\n";
  dot_region(graph, graph.root(), out, 1);
  out += "}\n";
  return out;
}

std::map<std::string, std::size_t>
graph_stats(const Graph & graph)
{
  std::map<std::string, std::size_t> stats;
  stats["nodes"] = 0;
  stats["depth"] = 0;
  count_region(graph, graph.root(), 0, stats);
  return stats;
}

}
