#ifndef RVSDG_PASSES_HPP
#define RVSDG_PASSES_HPP

#include <rvsdg/graph.hpp>

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace rvsdg
{

enum class Pass : std::uint8_t
{
  DNE,
  CNE,
  ILN,
  INV,
  PSH,
  PLL,
  RED,
  URL,
  IVT
};

inline constexpr Pass all_passes[] = { Pass::DNE, Pass::CNE, Pass::ILN, Pass::INV, Pass::PSH,
                                       Pass::PLL, Pass::RED, Pass::URL, Pass::IVT };

inline constexpr const char * default_pass_order =
    "ILN INV RED DNE IVT INV DNE PSH INV DNE URL INV RED CNE DNE PLL INV DNE";

std::string_view
pass_name(Pass pass) noexcept;

std::optional<Pass>
pass_from_name(std::string_view name);

/// Splits on commas and whitespace. Throws Error on unknown names.
std::vector<Pass>
parse_pass_list(std::string_view text);

struct PassConfig
{
  std::vector<Pass> passes = parse_pass_list(default_pass_order);
  unsigned unroll_factor = 4;
  /// Passes skipped wherever they appear in the list.
  std::set<Pass> disabled;
};

struct PassRecord
{
  Pass pass;
  std::size_t nodes_before = 0;
  std::size_t nodes_after = 0;
  /// Pass-specific number of rewrites.
  std::size_t changes = 0;
};

struct PipelineStats
{
  std::vector<PassRecord> records;

  /// key=value lines, e.g. "pass.3.DNE.nodes_after=12".
  [[nodiscard]] std::string
  str() const;
};

/// Origins that are alive after the mark phase of dead node elimination.
std::unordered_set<OriginId>
dne_mark(const Graph & graph);

/// Dead node elimination. Returns the number of removed nodes and port groups.
std::size_t
dne(Graph & graph);

/// Common node elimination; diverts users of congruent origins to one representative. Returns the
/// number of diverted origins. Dead duplicates are left for dne.
std::size_t
cne(Graph & graph);

/// Inlines direct calls of non-recursive functions with a single call site or a small body.
std::size_t
iln(Graph & graph);

inline constexpr std::size_t inline_size_limit = 16;

/// Redirects users of invariant θ loop variables and γ exit variables to the value entering the
/// node. Iterates to a fixpoint.
std::size_t
inv(Graph & graph);

/// Hoists stateless nodes with invariant operands out of θ- and γ-regions.
std::size_t
psh(Graph & graph);

/// Moves stateless nodes used by a single γ alternative into that alternative.
std::size_t
pll(Graph & graph);

/// Constant folding, algebraic simplification and γ-nodes with constant predicates.
std::size_t
red(Graph & graph);

inline constexpr unsigned reduction_rounds = 4;

/// Unrolls every θ-node without nested θ-nodes by \p factor.
std::size_t
url(Graph & graph, unsigned factor);

/// Turns θ-nodes wrapping a γ-node on the loop predicate into γ-nodes holding the loop.
std::size_t
ivt(Graph & graph);

std::size_t
run_pass(Graph & graph, Pass pass, const PassConfig & config = {});

/**
 * Runs the configured passes in order and validates the graph after each one. Throws
 * InvariantError naming the pass when validation fails.
 */
PipelineStats
run_pipeline(Graph & graph, const PassConfig & config = {});

}

#endif
