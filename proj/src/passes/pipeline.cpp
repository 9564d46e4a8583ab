#include <rvsdg/error.hpp>
#include <rvsdg/passes.hpp>

namespace rvsdg
{

std::string_view
pass_name(Pass pass) noexcept
{
  switch (pass)
  {
  case Pass::DNE:
    return "DNE";
  case Pass::CNE:
    return "CNE";
  case Pass::ILN:
    return "ILN";
  case Pass::INV:
    return "INV";
  case Pass::PSH:
    return "PSH";
  case Pass::PLL:
    return "PLL";
  case Pass::RED:
    return "RED";
  case Pass::URL:
    return "URL";
  case Pass::IVT:
    return "IVT";
  }
  return "?";
}

std::optional<Pass>
pass_from_name(std::string_view name)
{
  for (auto pass : all_passes)
  {
    if (pass_name(pass) == name)
      return pass;
  }
  return std::nullopt;
}

std::vector<Pass>
parse_pass_list(std::string_view text)
{
  std::vector<Pass> passes;
  std::size_t pos = 0;
  while (pos < text.size())
  {
    auto end = text.find_first_of(", \t\n", pos);
    if (end == std::string_view::npos)
      end = text.size();
    auto word = text.substr(pos, end - pos);
    if (!word.empty())
    {
      auto pass = pass_from_name(word);
      if (!pass)
        throw Error("unknown pass '" + std::string(word) + "'");
      passes.push_back(*pass);
    }
    pos = end + 1;
  }
  return passes;
}

std::string
PipelineStats::str() const
{
  std::string s;
  for (std::size_t n = 0; n < records.size(); n++)
  {
    auto prefix = "pass." + std::to_string(n) + "." + std::string(pass_name(records[n].pass)) + ".";
    s += prefix + "nodes_before=" + std::to_string(records[n].nodes_before) + "\n";
    s += prefix + "nodes_after=" + std::to_string(records[n].nodes_after) + "\n";
    s += prefix + "changes=" + std::to_string(records[n].changes) + "\n";
  }
  return s;
}

std::size_t
run_pass(Graph & graph, Pass pass, const PassConfig & config)
{
  switch (pass)
  {
  case Pass::DNE:
    return dne(graph);
  case Pass::CNE:
    return cne(graph);
  case Pass::ILN:
    return iln(graph);
  case Pass::INV:
    return inv(graph);
  case Pass::PSH:
    return psh(graph);
  case Pass::PLL:
    return pll(graph);
  case Pass::RED:
    return red(graph);
  case Pass::URL:
    return url(graph, config.unroll_factor);
  case Pass::IVT:
    return ivt(graph);
  }
  return 0;
}

PipelineStats
run_pipeline(Graph & graph, const PassConfig & config)
{
  if (config.unroll_factor < 1)
    throw Error("unroll factor must be at least 1");
  PipelineStats stats;
  for (auto pass : config.passes)
  {
    if (config.disabled.count(pass))
      continue;
    PassRecord record{ pass };
    record.nodes_before = graph.num_nodes();
    record.changes = run_pass(graph, pass, config);
    record.nodes_after = graph.num_nodes();
    auto violations = graph.validate();
    if (!violations.empty())
      throw InvariantError(
          "graph invalid after " + std::string(pass_name(pass)) + ": " + violations.front());
    stats.records.push_back(record);
  }
  return stats;
}

}
