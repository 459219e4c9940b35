#pragma once

#include <optional>
#include <string>
#include <vector>

#include "poeparse/numeric.hpp"

namespace scfg {

using poe::Int;
using poe::Rat;

// A grammar symbol: terminal or nonterminal, identified by index into the
// owning grammar's name tables.
struct Sym {
    bool terminal = false;
    int id = 0;
    friend bool operator==(const Sym&, const Sym&) = default;
};

struct Rule {
    int lhs = 0;
    std::vector<Sym> rhs;   // empty = epsilon rule
    Rat prob;
};

/*
 * Stochastic context-free grammar: every rule carries a positive rational
 * probability and, for each nonterminal A, sum of p over A's rules is <= 1
 * (improper grammars with sum < 1 are legal). Epsilon rules are permitted.
 */
struct Grammar {
    std::vector<std::string> nonterminals;
    std::vector<std::string> terminals;
    std::vector<Rule> rules;
    int start = 0;

    int nt_count() const { return static_cast<int>(nonterminals.size()); }
    int add_nonterminal(const std::string& name);
    int add_terminal(const std::string& name);
    std::optional<int> find_nonterminal(const std::string& name) const;
    std::optional<int> find_terminal(const std::string& name) const;
    std::vector<std::vector<int>> rules_by_lhs() const;
};

// Exact-rational checks: every prob in (0, 1], per-nonterminal sums <= 1,
// symbol indices in range. Throws std::invalid_argument with the offending
// rule. `weighted` skips the per-nonterminal sum check (used for grammars
// produced by the automaton product, which are weighted, not stochastic).
void validate(const Grammar& g, bool weighted = false);

/*
 * Text format, one rule per line:
 *
 *     %start S           (optional; default: first nonterminal mentioned)
 *     S -> A B # 1/2
 *     A -> 'a' # 0.3
 *     A -> # 1/5         (epsilon rule)
 *
 * Quoted tokens are terminals, bare identifiers nonterminals, and the
 * probability after '#' is an exact rational or decimal.
 */
Grammar grammar_from_text(const std::string& text);
std::string grammar_to_text(const Grammar& g);

// Tokenizes a terminal string: space-separated terminal names, quoted or
// bare; falls back to per-character splitting when all terminals are single
// characters. Empty input is the empty string.
std::vector<int> tokenize_word(const Grammar& g, const std::string& word);
std::string word_to_string(const Grammar& g, const std::vector<int>& word);

enum class NtType { L, Q, T };

/*
 * Simple normal form: every nonterminal is
 *   L - only unit rules A -> B,
 *   Q - exactly one rule A -> B C with probability 1,
 *   T - exactly one rule A -> a or A -> epsilon with probability 1.
 * Conversion adds fresh probability-1 nonterminals; rule_origin maps each
 * SNF rule to the original rule whose probability it carries (-1 for
 * auxiliary structure), which supports recovering parse trees in either
 * direction.
 */
struct SnfGrammar {
    Grammar g;
    std::vector<NtType> nt_type;          // per nonterminal of g
    std::vector<int> rule_origin;         // per rule of g: original rule or -1
    std::vector<int> carrier_of_origin;   // per original rule: its SNF carrier rule
    int original_nt_count = 0;
};

SnfGrammar to_snf(const Grammar& g);

}  // namespace scfg
