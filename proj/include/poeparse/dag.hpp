#pragma once

#include <string>
#include <vector>

#include "poeparse/grammar.hpp"
#include "poeparse/poe.hpp"

namespace scfg {

/*
 * Succinct parse-tree representation: a rooted ordered DAG whose sinks are
 * terminal or epsilon leaves and whose internal nodes carry a nonterminal
 * plus the rule applied there; shared subDAGs unfold with multiplicity, so a
 * tree of doubly-exponential size fits in linearly many nodes. An epsilon
 * rule's node has a single epsilon leaf child. NtLeaf marks an unexpanded
 * nonterminal frontier and appears only in the partial DAGs produced by the
 * unary-reachability step.
 */
struct DagNode {
    enum class Kind { Leaf, NtLeaf, Internal };
    Kind kind = Kind::Leaf;
    int label = -1;                // Leaf: terminal id, -1 for epsilon; otherwise nonterminal id
    int rule = -1;                 // Internal only
    std::vector<int> children;     // Internal only; child indices precede the node
};

struct ParseDag {
    std::vector<DagNode> nodes;
    int root = -1;
    poe::PoE prob;

    bool empty() const { return nodes.empty(); }
};

// Structural checks: topological child order, a single source (the root),
// label/rule consistency, children concatenating to the rule's right side.
void validate_dag(const ParseDag& d, const Grammar& g, bool allow_nt_leaves = false);

// Terminal yield, computed bottom-up; throws BudgetExceeded if the unfolded
// yield would exceed max_length symbols.
std::vector<int> dag_yield(const ParseDag& d, const Grammar& g, long max_length = 1 << 20);

// Product over internal nodes (with unfolding multiplicity) of rule
// probabilities, as a PoE; linear in the DAG size.
poe::PoE dag_poe_prob(const ParseDag& d, const Grammar& g);

// Exact rational probability; BudgetExceeded when it needs more bits.
Rat dag_unfold_prob(const ParseDag& d, const Grammar& g, long bit_budget);

// Topologically ordered definitions: `n0 := Leaf 'a'`, `n2 := A [rule 7]
// (n0, n1)`, then `root n2` and `prob = <PoE text>`.
std::string dag_to_text(const ParseDag& d, const Grammar& g);

// Parse-tree translation along the SNF conversion, in both directions.
// Forward expands each original rule application into its carrier and
// auxiliary chain; backward splices auxiliary nodes away. Both preserve
// yield and probability and are mutually inverse.
ParseDag dag_to_snf(const ParseDag& d, const Grammar& original, const SnfGrammar& snf);
ParseDag dag_from_snf(const ParseDag& d, const SnfGrammar& snf, const Grammar& original);

}  // namespace scfg
