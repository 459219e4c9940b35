#include "poeparse/dag.hpp"

#include <functional>
#include <map>
#include <sstream>

namespace scfg {

void validate_dag(const ParseDag& d, const Grammar& g, bool allow_nt_leaves) {
    if (d.nodes.empty() || d.root < 0 || d.root >= static_cast<int>(d.nodes.size()))
        throw std::invalid_argument("dag: missing root");
    std::vector<int> incoming(d.nodes.size(), 0);
    for (size_t i = 0; i < d.nodes.size(); ++i) {
        const DagNode& n = d.nodes[i];
        switch (n.kind) {
            case DagNode::Kind::Leaf:
                if (n.label != -1 && (n.label < 0 || n.label >= static_cast<int>(g.terminals.size())))
                    throw std::invalid_argument("dag: bad leaf label");
                break;
            case DagNode::Kind::NtLeaf:
                if (!allow_nt_leaves)
                    throw std::invalid_argument("dag: unexpanded nonterminal leaf");
                if (n.label < 0 || n.label >= g.nt_count())
                    throw std::invalid_argument("dag: bad nonterminal leaf label");
                break;
            case DagNode::Kind::Internal: {
                if (n.rule < 0 || n.rule >= static_cast<int>(g.rules.size()))
                    throw std::invalid_argument("dag: bad rule reference");
                const Rule& r = g.rules[n.rule];
                if (r.lhs != n.label)
                    throw std::invalid_argument("dag: node label disagrees with rule head");
                for (int c : n.children) {
                    if (c < 0 || c >= static_cast<int>(i))
                        throw std::invalid_argument("dag: child does not precede parent");
                    ++incoming[c];
                }
                // Children labels must concatenate to the rule's right side;
                // an epsilon rule has exactly one epsilon leaf child.
                if (r.rhs.empty()) {
                    if (n.children.size() != 1 ||
                        d.nodes[n.children[0]].kind != DagNode::Kind::Leaf ||
                        d.nodes[n.children[0]].label != -1)
                        throw std::invalid_argument("dag: epsilon rule needs one epsilon leaf");
                } else {
                    if (n.children.size() != r.rhs.size())
                        throw std::invalid_argument("dag: child count mismatch");
                    for (size_t k = 0; k < r.rhs.size(); ++k) {
                        const DagNode& c = d.nodes[n.children[k]];
                        const Sym& s = r.rhs[k];
                        bool ok = s.terminal
                                      ? (c.kind == DagNode::Kind::Leaf && c.label == s.id)
                                      : (c.kind != DagNode::Kind::Leaf && c.label == s.id);
                        if (!ok) throw std::invalid_argument("dag: child label mismatch");
                    }
                }
                break;
            }
        }
    }
    // Single source: only the root lacks incoming edges.
    for (size_t i = 0; i < d.nodes.size(); ++i) {
        if (static_cast<int>(i) == d.root) {
            if (incoming[i] != 0) throw std::invalid_argument("dag: root has a parent");
        } else if (incoming[i] == 0) {
            throw std::invalid_argument("dag: node " + std::to_string(i) + " is unreachable");
        }
    }
}

std::vector<int> dag_yield(const ParseDag& d, const Grammar& g, long max_length) {
    (void)g;
    std::vector<Int> len(d.nodes.size());
    for (size_t i = 0; i < d.nodes.size(); ++i) {
        const DagNode& n = d.nodes[i];
        if (n.kind == DagNode::Kind::Leaf)
            len[i] = n.label >= 0 ? 1 : 0;
        else if (n.kind == DagNode::Kind::NtLeaf)
            len[i] = 0;
        else
            for (int c : n.children) len[i] += len[c];
        if (len[i] > max_length)
            throw poe::BudgetExceeded("dag_yield: yield longer than " + std::to_string(max_length));
    }
    std::vector<int> out;
    out.reserve(len[d.root].get_ui());
    // Iterative expansion; shared nodes are walked once per occurrence, which
    // the length cap above keeps polynomial.
    std::vector<int> stack{d.root};
    while (!stack.empty()) {
        int i = stack.back();
        stack.pop_back();
        const DagNode& n = d.nodes[i];
        if (n.kind == DagNode::Kind::Leaf) {
            if (n.label >= 0) out.push_back(n.label);
        } else if (n.kind == DagNode::Kind::Internal) {
            for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) stack.push_back(*it);
        }
    }
    return out;
}

poe::PoE dag_poe_prob(const ParseDag& d, const Grammar& g) {
    std::vector<poe::PoE> prob(d.nodes.size());
    for (size_t i = 0; i < d.nodes.size(); ++i) {
        const DagNode& n = d.nodes[i];
        if (n.kind != DagNode::Kind::Internal) continue;
        poe::PoE p = poe::poe_from_rat(g.rules[n.rule].prob);
        for (int c : n.children) p = poe::mul(p, prob[c]);
        prob[i] = std::move(p);
    }
    return prob[d.root];
}

Rat dag_unfold_prob(const ParseDag& d, const Grammar& g, long bit_budget) {
    return poe::eval_exact(dag_poe_prob(d, g), bit_budget);
}

std::string dag_to_text(const ParseDag& d, const Grammar& g) {
    std::ostringstream os;
    for (size_t i = 0; i < d.nodes.size(); ++i) {
        const DagNode& n = d.nodes[i];
        os << "n" << i << " := ";
        switch (n.kind) {
            case DagNode::Kind::Leaf:
                if (n.label < 0)
                    os << "Leaf eps";
                else
                    os << "Leaf '" << g.terminals[n.label] << "'";
                break;
            case DagNode::Kind::NtLeaf:
                os << "Nt " << g.nonterminals[n.label];
                break;
            case DagNode::Kind::Internal: {
                os << g.nonterminals[n.label] << " [rule " << n.rule << "] (";
                for (size_t k = 0; k < n.children.size(); ++k) {
                    if (k) os << ", ";
                    os << "n" << n.children[k];
                }
                os << ")";
                break;
            }
        }
        os << "\n";
    }
    os << "root n" << d.root << "\n";
    os << "prob = " << poe::poe_to_text(d.prob) << "\n";
    return os.str();
}

namespace {

struct Translator {
    const ParseDag& in;
    ParseDag out;
    std::map<int, int> memo;

    int emit(DagNode n) {
        out.nodes.push_back(std::move(n));
        return static_cast<int>(out.nodes.size()) - 1;
    }
    int leaf(int label) { return emit({DagNode::Kind::Leaf, label, -1, {}}); }
};

}  // namespace

ParseDag dag_to_snf(const ParseDag& d, const Grammar& original, const SnfGrammar& snf) {
    validate_dag(d, original, true);
    Translator tr{d};
    auto by_lhs = snf.g.rules_by_lhs();

    // Expands an auxiliary nonterminal, consuming mapped original children in
    // order; `queue` holds (original child index) positions still to place.
    std::function<int(int, std::vector<int>&, size_t&)> build_aux;
    std::function<int(int)> map_node;

    build_aux = [&](int nt, std::vector<int>& orig_children, size_t& next) -> int {
        const auto& rid = by_lhs[nt];
        if (rid.size() != 1) throw std::logic_error("snf: auxiliary nonterminal without unique rule");
        const Rule& r = snf.g.rules[rid[0]];
        std::vector<int> ch;
        if (r.rhs.empty()) {
            ch.push_back(tr.leaf(-1));
        } else if (r.rhs.size() == 1 && r.rhs[0].terminal) {
            // terminal wrapper: consumes one original leaf child
            const DagNode& oc = d.nodes[orig_children[next]];
            if (oc.kind != DagNode::Kind::Leaf || oc.label != r.rhs[0].id)
                throw std::logic_error("snf: terminal wrapper mismatch");
            ++next;
            ch.push_back(tr.leaf(r.rhs[0].id));
        } else {
            for (const Sym& s : r.rhs) {
                if (s.terminal) throw std::logic_error("snf: unexpected terminal in chain");
                if (s.id < snf.original_nt_count) {
                    ch.push_back(map_node(orig_children[next]));
                    ++next;
                } else {
                    ch.push_back(build_aux(s.id, orig_children, next));
                }
            }
        }
        return tr.emit({DagNode::Kind::Internal, nt, rid[0], std::move(ch)});
    };

    map_node = [&](int idx) -> int {
        auto it = tr.memo.find(idx);
        if (it != tr.memo.end()) return it->second;
        const DagNode& n = d.nodes[idx];
        int res;
        switch (n.kind) {
            case DagNode::Kind::Leaf:
                res = tr.leaf(n.label);
                break;
            case DagNode::Kind::NtLeaf:
                res = tr.emit({DagNode::Kind::NtLeaf, n.label, -1, {}});
                break;
            case DagNode::Kind::Internal: {
                int carrier = snf.carrier_of_origin[n.rule];
                const Rule& orig_rule = original.rules[n.rule];
                const Rule& new_rule = snf.g.rules[carrier];
                if (new_rule.rhs == orig_rule.rhs) {
                    // verbatim rule: map children positionally
                    std::vector<int> ch;
                    if (orig_rule.rhs.empty()) {
                        ch.push_back(tr.leaf(-1));
                    } else {
                        for (int c : n.children) ch.push_back(map_node(c));
                    }
                    res = tr.emit({DagNode::Kind::Internal, n.label, carrier, std::move(ch)});
                } else {
                    // carrier A ->p X_r, expansion consumes children in order
                    std::vector<int> oc = n.children;
                    // drop the epsilon leaf of an original epsilon rule
                    if (orig_rule.rhs.empty()) oc.clear();
                    size_t next = 0;
                    int target = new_rule.rhs[0].id;
                    int sub = build_aux(target, oc, next);
                    if (next != oc.size()) throw std::logic_error("snf: unconsumed children");
                    res = tr.emit({DagNode::Kind::Internal, n.label, carrier, {sub}});
                }
                break;
            }
        }
        tr.memo[idx] = res;
        return res;
    };

    tr.out.root = map_node(d.root);
    tr.out.prob = dag_poe_prob(tr.out, snf.g);
    return tr.out;
}

ParseDag dag_from_snf(const ParseDag& d, const SnfGrammar& snf, const Grammar& original) {
    validate_dag(d, snf.g, true);
    Translator tr{d};

    std::function<int(int)> map_node;
    // Splices away auxiliary structure, returning translated children of an
    // original rule application in order.
    std::function<void(int, std::vector<int>&)> flatten = [&](int idx, std::vector<int>& outc) {
        const DagNode& n = d.nodes[idx];
        switch (n.kind) {
            case DagNode::Kind::Leaf:
                outc.push_back(tr.leaf(n.label));
                break;
            case DagNode::Kind::NtLeaf:
                outc.push_back(map_node(idx));
                break;
            case DagNode::Kind::Internal:
                if (snf.rule_origin[n.rule] < 0) {
                    for (int c : n.children) flatten(c, outc);
                } else {
                    outc.push_back(map_node(idx));
                }
                break;
        }
    };

    map_node = [&](int idx) -> int {
        auto it = tr.memo.find(idx);
        if (it != tr.memo.end()) return it->second;
        const DagNode& n = d.nodes[idx];
        int res;
        switch (n.kind) {
            case DagNode::Kind::Leaf:
                res = tr.leaf(n.label);
                break;
            case DagNode::Kind::NtLeaf:
                if (n.label >= snf.original_nt_count)
                    throw std::logic_error("snf: auxiliary nonterminal escapes the mapping");
                res = tr.emit({DagNode::Kind::NtLeaf, n.label, -1, {}});
                break;
            case DagNode::Kind::Internal: {
                int origin = snf.rule_origin[n.rule];
                if (origin < 0)
                    throw std::logic_error("snf: auxiliary rule at a mapped position");
                const Rule& orig_rule = original.rules[origin];
                std::vector<int> ch;
                if (orig_rule.rhs.empty()) {
                    ch.push_back(tr.leaf(-1));
                } else {
                    for (int c : n.children) flatten(c, ch);
                }
                res = tr.emit({DagNode::Kind::Internal, orig_rule.lhs, origin, std::move(ch)});
                break;
            }
        }
        tr.memo[idx] = res;
        return res;
    };

    tr.out.root = map_node(d.root);
    tr.out.prob = dag_poe_prob(tr.out, original);
    return tr.out;
}

}  // namespace scfg
