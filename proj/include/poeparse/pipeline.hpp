#pragma once

#include <optional>
#include <vector>

#include "poeparse/compare.hpp"
#include "poeparse/dag.hpp"
#include "poeparse/grammar.hpp"

namespace scfg {

// A maximum-probability value: zero (no derivation) or a positive PoE over
// rule probabilities.
struct Prob {
    bool zero = true;
    poe::PoE value;

    static Prob none() { return {}; }
    static Prob of(poe::PoE p) { return {false, std::move(p)}; }
};

enum class Exec { Serial, Parallel };

struct PipelineOptions {
    poe::CompareMode mode = poe::CompareMode::adaptive();
    Exec exec = Exec::Parallel;
    bool keep_tables = false;
    bool build_dags = true;
};

// Runtime guard asserting every computed PoE keeps its exponent sum below
// 2 n^2 2^n (n = nonterminal count of the grammar in use); violations throw
// std::logic_error. Enabled by default.
void set_exponent_bound_check(bool enabled);
bool exponent_bound_check_enabled();

struct EpsResult {
    std::vector<Prob> prob;                    // per nonterminal
    std::vector<std::optional<ParseDag>> dag;  // present iff nonzero and DAGs requested
};

// Greedy settling (Knuth's variant of Dijkstra over the grammar) of the
// maximum probability of deriving epsilon from each nonterminal, after
// removing every rule whose right side mentions a terminal. Works on any
// SCFG; all comparisons run through the certified comparator.
EpsResult max_eps_probs(const Grammar& g, const PipelineOptions& opt = {});

// Max probability that a derivation from A yields exactly the single
// nonterminal B: best paths in the edge-labeled graph H whose edges come
// from unit rules and from binary rules with an epsilon-consumed sibling.
struct UnaryReachResult {
    int nt_count = 0;
    std::vector<Prob> prob;                    // [a * nt_count + b]
    std::vector<std::optional<ParseDag>> dag;  // partial DAGs with one NtLeaf(b)

    const Prob& at(int a, int b) const { return prob[static_cast<size_t>(a) * nt_count + b]; }
    const std::optional<ParseDag>& dag_at(int a, int b) const {
        return dag[static_cast<size_t>(a) * nt_count + b];
    }
};

UnaryReachResult max_unary_reach(const SnfGrammar& snf, const EpsResult& eps,
                                 const PipelineOptions& opt = {});

// The chart values: q restricts the root to a terminal rule (j = 1) or a
// binary rule with two nonempty children; p composes a unary descent with q.
struct ParseTables {
    int nt_count = 0;
    int word_len = 0;
    std::vector<Prob> eps;    // per nonterminal
    std::vector<Prob> unary;  // [a * nt_count + b]
    std::vector<Prob> q, p;   // [(a * word_len + (i-1)) * word_len + (j-1)]

    const Prob& q_at(int a, int i, int j) const {
        return q[(static_cast<size_t>(a) * word_len + (i - 1)) * word_len + (j - 1)];
    }
    const Prob& p_at(int a, int i, int j) const {
        return p[(static_cast<size_t>(a) * word_len + (i - 1)) * word_len + (j - 1)];
    }
};

struct MaxParseResult {
    Prob prob;
    std::optional<ParseDag> dag;          // over the SNF grammar
    std::optional<ParseTables> tables;
};

// Exact maximum parse probability of `word` (terminal ids) under an SNF
// grammar, with a witnessing parse DAG. The empty word dispatches to
// max_eps_probs on the start symbol. Layered chart cells are independent
// within a layer; Exec::Parallel computes them with OpenMP with no
// observable nondeterminism (tie-breaking stays index-ordered).
MaxParseResult max_parse(const SnfGrammar& snf, const std::vector<int>& word,
                         const PipelineOptions& opt = {});

// Independent evaluation route: weighted grammar over triples (s, A, s')
// intersected with the word's linear automaton, evaluated by the same
// greedy settling rooted at (s0, S, sn).
struct ProductResult {
    Grammar product;  // weighted grammar (per-nonterminal sums may exceed 1)
    int root_nt = -1;
    Prob prob;
};

ProductResult product_construction(const SnfGrammar& snf, const std::vector<int>& word,
                                   const PipelineOptions& opt = {});

// Log-domain approximation: rule weights -log2 p(r) are approximated to k
// bits, the same three stages run additively over exact dyadic rationals
// with native comparisons, and the argmax DAG is mapped back to the
// original grammar. For member words, |log2(pmax) - log2_prob| <= eps and
// the DAG's exact probability is >= (1 - eps) * pmax.
struct ApproxResult {
    bool member = false;
    Rat log2_prob;
    std::optional<ParseDag> dag;  // over the original grammar
    poe::PoE dag_prob;            // exact probability of dag
    long precision_bits = 0;      // weight precision k actually used
};

ApproxResult approx_max_parse(const Grammar& g, const std::vector<int>& word, const Rat& eps,
                              const PipelineOptions& opt = {});

}  // namespace scfg
