#include "poeparse/grammar.hpp"

#include <map>

namespace scfg {

namespace {

bool is_unit(const Grammar& g, const Rule& r) {
    return r.rhs.size() == 1 && !r.rhs[0].terminal;
    (void)g;
}

// Already-SNF classification of an original nonterminal.
std::optional<NtType> snf_type_of(const Grammar& g, const std::vector<int>& rule_ids) {
    bool all_unit = true;
    for (int r : rule_ids)
        if (!is_unit(g, g.rules[r])) all_unit = false;
    if (all_unit) return NtType::L;  // includes nonterminals with no rules
    if (rule_ids.size() == 1) {
        const Rule& r = g.rules[rule_ids[0]];
        if (r.prob == 1) {
            if (r.rhs.size() == 2 && !r.rhs[0].terminal && !r.rhs[1].terminal) return NtType::Q;
            if (r.rhs.empty() || (r.rhs.size() == 1 && r.rhs[0].terminal)) return NtType::T;
        }
    }
    return std::nullopt;
}

}  // namespace

SnfGrammar to_snf(const Grammar& g) {
    validate(g);
    SnfGrammar out;
    out.g.nonterminals = g.nonterminals;
    out.g.terminals = g.terminals;
    out.g.start = g.start;
    out.original_nt_count = g.nt_count();
    out.nt_type.assign(g.nonterminals.size(), NtType::L);
    out.carrier_of_origin.assign(g.rules.size(), -1);

    auto by_lhs = g.rules_by_lhs();
    std::vector<std::optional<NtType>> kind(g.nonterminals.size());
    for (int a = 0; a < g.nt_count(); ++a) kind[a] = snf_type_of(g, by_lhs[a]);

    std::map<int, int> terminal_wrapper;  // terminal id -> wrapper nonterminal

    auto add_rule = [&](int lhs, std::vector<Sym> rhs, Rat prob, int origin) {
        Rule r;
        r.lhs = lhs;
        r.rhs = std::move(rhs);
        r.prob = std::move(prob);
        out.g.rules.push_back(std::move(r));
        out.rule_origin.push_back(origin);
        return static_cast<int>(out.g.rules.size()) - 1;
    };

    auto fresh_nt = [&](const std::string& name, NtType t) {
        int id = out.g.add_nonterminal(name);
        out.nt_type.push_back(t);
        return id;
    };

    // Nonterminal generating a single terminal with probability 1, shared.
    auto wrap_terminal = [&](int tid) {
        auto it = terminal_wrapper.find(tid);
        if (it != terminal_wrapper.end()) return it->second;
        int id = fresh_nt("@t" + std::to_string(tid), NtType::T);
        add_rule(id, {{true, tid}}, 1, -1);
        terminal_wrapper[tid] = id;
        return id;
    };

    auto nt_of_sym = [&](const Sym& s) { return s.terminal ? wrap_terminal(s.id) : s.id; };

    for (size_t ri = 0; ri < g.rules.size(); ++ri) {
        const Rule& r = g.rules[ri];
        int a = r.lhs;
        if (kind[a]) {
            out.nt_type[a] = *kind[a];
            out.carrier_of_origin[ri] = add_rule(a, r.rhs, r.prob, static_cast<int>(ri));
            continue;
        }
        // A is type-mixed: it becomes L, each rule riding on a unit carrier.
        out.nt_type[a] = NtType::L;
        if (is_unit(g, r)) {
            out.carrier_of_origin[ri] = add_rule(a, r.rhs, r.prob, static_cast<int>(ri));
            continue;
        }
        std::string base = "@r" + std::to_string(ri);
        if (r.rhs.empty()) {
            int x = fresh_nt(base, NtType::T);
            out.carrier_of_origin[ri] = add_rule(a, {{false, x}}, r.prob, static_cast<int>(ri));
            add_rule(x, {}, 1, -1);
        } else if (r.rhs.size() == 1) {
            // single terminal (single nonterminal handled above)
            int x = fresh_nt(base, NtType::T);
            out.carrier_of_origin[ri] = add_rule(a, {{false, x}}, r.prob, static_cast<int>(ri));
            add_rule(x, {r.rhs[0]}, 1, -1);
        } else {
            int x = fresh_nt(base, NtType::Q);
            out.carrier_of_origin[ri] = add_rule(a, {{false, x}}, r.prob, static_cast<int>(ri));
            // Right sides of length >= 3 are abbreviated by a fresh chain.
            int head = x;
            size_t pos = 0;
            while (r.rhs.size() - pos > 2) {
                int next = fresh_nt(base + "." + std::to_string(pos + 1), NtType::Q);
                add_rule(head, {{false, nt_of_sym(r.rhs[pos])}, {false, next}}, 1, -1);
                head = next;
                ++pos;
            }
            add_rule(head,
                     {{false, nt_of_sym(r.rhs[pos])}, {false, nt_of_sym(r.rhs[pos + 1])}}, 1, -1);
        }
    }

    validate(out.g);
    return out;
}

}  // namespace scfg
