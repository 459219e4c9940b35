#include "poeparse/grammar.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace scfg {

int Grammar::add_nonterminal(const std::string& name) {
    if (auto id = find_nonterminal(name)) return *id;
    nonterminals.push_back(name);
    return nt_count() - 1;
}

int Grammar::add_terminal(const std::string& name) {
    if (auto id = find_terminal(name)) return *id;
    terminals.push_back(name);
    return static_cast<int>(terminals.size()) - 1;
}

std::optional<int> Grammar::find_nonterminal(const std::string& name) const {
    auto it = std::find(nonterminals.begin(), nonterminals.end(), name);
    if (it == nonterminals.end()) return std::nullopt;
    return static_cast<int>(it - nonterminals.begin());
}

std::optional<int> Grammar::find_terminal(const std::string& name) const {
    auto it = std::find(terminals.begin(), terminals.end(), name);
    if (it == terminals.end()) return std::nullopt;
    return static_cast<int>(it - terminals.begin());
}

std::vector<std::vector<int>> Grammar::rules_by_lhs() const {
    std::vector<std::vector<int>> by(nonterminals.size());
    for (size_t r = 0; r < rules.size(); ++r) by[rules[r].lhs].push_back(static_cast<int>(r));
    return by;
}

void validate(const Grammar& g, bool weighted) {
    if (g.nonterminals.empty()) throw std::invalid_argument("grammar: no nonterminals");
    if (g.start < 0 || g.start >= g.nt_count())
        throw std::invalid_argument("grammar: invalid start symbol");
    std::vector<Rat> sums(g.nonterminals.size(), Rat(0));
    for (size_t i = 0; i < g.rules.size(); ++i) {
        const Rule& r = g.rules[i];
        std::string where = "rule " + std::to_string(i);
        if (r.lhs < 0 || r.lhs >= g.nt_count())
            throw std::invalid_argument(where + ": bad left-hand side");
        for (const Sym& s : r.rhs) {
            int limit = s.terminal ? static_cast<int>(g.terminals.size()) : g.nt_count();
            if (s.id < 0 || s.id >= limit)
                throw std::invalid_argument(where + ": bad right-hand-side symbol");
        }
        if (r.prob <= 0 || r.prob > 1)
            throw std::invalid_argument(where + ": probability " + r.prob.get_str() +
                                        " outside (0, 1]");
        sums[r.lhs] += r.prob;
    }
    if (!weighted) {
        for (int a = 0; a < g.nt_count(); ++a) {
            if (sums[a] > 1)
                throw std::invalid_argument("nonterminal '" + g.nonterminals[a] +
                                            "': rule probabilities sum to " + sums[a].get_str() +
                                            " > 1");
        }
    }
}

namespace {

bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '@' || c == '.' ||
           c == '(' || c == ')' || c == ',';
}

struct LineCursor {
    const std::string& s;
    int lineno;
    size_t pos = 0;
    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool done() {
        skip_ws();
        return pos >= s.size();
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw poe::ParseError(msg, lineno, static_cast<int>(pos) + 1);
    }
    std::string ident() {
        skip_ws();
        size_t start = pos;
        while (pos < s.size() && ident_char(s[pos])) ++pos;
        if (pos == start) fail("expected identifier");
        return s.substr(start, pos - start);
    }
};

}  // namespace

Grammar grammar_from_text(const std::string& text) {
    Grammar g;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    std::optional<std::string> start_name;
    while (std::getline(in, line)) {
        ++lineno;
        LineCursor cur{line, lineno};
        if (cur.done()) continue;
        if (line[cur.pos] == '%') {
            ++cur.pos;
            std::string kw = cur.ident();
            if (kw != "start") cur.fail("unknown directive '%" + kw + "'");
            start_name = cur.ident();
            if (!cur.done()) cur.fail("trailing garbage after %start");
            continue;
        }
        Rule r;
        std::string lhs = cur.ident();
        r.lhs = g.add_nonterminal(lhs);
        cur.skip_ws();
        if (cur.pos + 1 >= line.size() || line[cur.pos] != '-' || line[cur.pos + 1] != '>')
            cur.fail("expected '->'");
        cur.pos += 2;
        for (;;) {
            cur.skip_ws();
            if (cur.pos >= line.size()) cur.fail("missing '# probability'");
            if (line[cur.pos] == '#') break;
            if (line[cur.pos] == '\'') {
                size_t close = line.find('\'', cur.pos + 1);
                if (close == std::string::npos) cur.fail("unterminated terminal quote");
                std::string t = line.substr(cur.pos + 1, close - cur.pos - 1);
                if (t.empty()) cur.fail("empty terminal");
                r.rhs.push_back({true, g.add_terminal(t)});
                cur.pos = close + 1;
            } else {
                r.rhs.push_back({false, g.add_nonterminal(cur.ident())});
            }
        }
        ++cur.pos;  // consume '#'
        cur.skip_ws();
        std::string ptext = line.substr(cur.pos);
        try {
            r.prob = poe::rat_from_string(ptext);
        } catch (const std::exception& e) {
            cur.fail(std::string("bad probability: ") + e.what());
        }
        g.rules.push_back(std::move(r));
    }
    if (g.nonterminals.empty()) throw poe::ParseError("grammar has no rules", lineno, 1);
    if (start_name) {
        auto id = g.find_nonterminal(*start_name);
        if (!id) throw poe::ParseError("%start names unknown nonterminal '" + *start_name + "'", 1, 1);
        g.start = *id;
    } else {
        g.start = 0;  // first nonterminal mentioned
    }
    validate(g);
    return g;
}

std::string grammar_to_text(const Grammar& g) {
    std::ostringstream os;
    os << "%start " << g.nonterminals[g.start] << "\n";
    for (const Rule& r : g.rules) {
        os << g.nonterminals[r.lhs] << " ->";
        for (const Sym& s : r.rhs) {
            if (s.terminal)
                os << " '" << g.terminals[s.id] << "'";
            else
                os << " " << g.nonterminals[s.id];
        }
        os << " # " << r.prob.get_str() << "\n";
    }
    return os.str();
}

std::vector<int> tokenize_word(const Grammar& g, const std::string& word) {
    std::vector<int> out;
    std::istringstream in(word);
    std::string tok;
    bool all_found = true;
    std::vector<std::string> toks;
    while (in >> tok) {
        if (tok.size() >= 2 && tok.front() == '\'' && tok.back() == '\'')
            tok = tok.substr(1, tok.size() - 2);
        toks.push_back(tok);
        if (!g.find_terminal(tok)) all_found = false;
    }
    if (all_found) {
        for (const auto& t : toks) out.push_back(*g.find_terminal(t));
        return out;
    }
    // Single-character fallback: split every non-space character.
    bool single = std::all_of(g.terminals.begin(), g.terminals.end(),
                              [](const std::string& t) { return t.size() == 1; });
    if (single) {
        out.clear();
        for (char c : word) {
            if (std::isspace(static_cast<unsigned char>(c))) continue;
            auto id = g.find_terminal(std::string(1, c));
            if (!id)
                throw std::invalid_argument("character '" + std::string(1, c) +
                                            "' is not a terminal of the grammar");
            out.push_back(*id);
        }
        return out;
    }
    throw std::invalid_argument("word contains tokens outside the grammar's terminal alphabet");
}

std::string word_to_string(const Grammar& g, const std::vector<int>& word) {
    std::string s;
    for (size_t i = 0; i < word.size(); ++i) {
        if (i) s += " ";
        s += g.terminals[word[i]];
    }
    return s;
}

}  // namespace scfg
