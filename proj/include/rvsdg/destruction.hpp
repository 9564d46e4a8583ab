#ifndef RVSDG_DESTRUCTION_HPP
#define RVSDG_DESTRUCTION_HPP

#include <rvsdg/graph.hpp>
#include <rvsdg/ir.hpp>

#include <string>
#include <unordered_map>

namespace rvsdg
{

/**
 * Inter-procedural control flow recovery. Every ω import becomes an external entity, every λ- and
 * δ-node (including φ members) a function or global; entities reached from an ω result are
 * exported under the result's name. Bodies are produced by structured control flow recovery and
 * are not in SSA form.
 */
ir::Module
inter_pcfr(const Graph & graph);

/**
 * Structured control flow recovery of one λ- or δ-node. γ-nodes become a branch on a selector
 * variable with one block sequence per alternative and a common join, θ-nodes a tail-controlled
 * loop. State edges produce no code.
 *
 * \p symbols names the entity behind each context variable's origin. The returned entity is
 * unnamed and internal.
 */
ir::Entity
scfr(const Graph & graph, NodeId node, const std::unordered_map<OriginId, std::string> & symbols);

/// inter_pcfr followed by SSA construction of every body.
ir::Module
destruct(const Graph & graph);

}

#endif
