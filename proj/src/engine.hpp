#pragma once

// Internal machinery shared by the exact (max-product PoE) and approximate
// (min-sum dyadic weight) pipelines: greedy grammar settling, best paths in
// the unary graph H, the layered chart, and value-independent DAG assembly
// from the recorded argmax choices.

#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <tuple>
#include <vector>

#include "poeparse/pipeline.hpp"

namespace scfg::detail {

using poe::Int;
using poe::Rat;

// Process-wide interning of normalized PoE values plus a comparison memo;
// products of the same few rule probabilities recur constantly across the
// pipeline, so comparisons resolve to a lookup almost always.
int intern_poe(const poe::PoE& p);
const poe::PoE& interned_poe(int id);
int cmp_interned(int x, int y, const poe::CompareMode& mode);

// Exact policy: values are interned PoE ids, ordered by the certified
// comparator. exp_bound, when set, enforces the exponent-sum guard.
struct MaxProbPolicy {
    poe::CompareMode mode;
    std::optional<Int> exp_bound;

    using Value = int;
    Value one() const { return intern_poe({}); }
    Value rule_factor(const Grammar& g, int rule) const {
        return check(intern_poe(poe::poe_from_rat(g.rules[rule].prob)));
    }
    Value times(Value a, Value b) const {
        return check(intern_poe(poe::mul(interned_poe(a), interned_poe(b))));
    }
    bool better(Value a, Value b) const { return cmp_interned(a, b, mode) > 0; }
    Value check(Value v) const;
};

// Approximate policy: values are nonnegative dyadic weights (-log2 of the
// probability, approximated), combined by addition, smaller is better.
struct MinWeightPolicy {
    const std::vector<Rat>* rule_weights = nullptr;

    using Value = Rat;
    Value one() const { return Rat(0); }
    Value rule_factor(const Grammar&, int rule) const { return (*rule_weights)[rule]; }
    Value times(const Value& a, const Value& b) const { return Value(a + b); }
    bool better(const Value& a, const Value& b) const { return a < b; }
};

template <class P>
struct KnuthOut {
    std::vector<std::optional<typename P::Value>> val;  // per nonterminal; absent = none
    std::vector<int> rule;                              // settled rule, -1 if none
};

/*
 * Greedy settling: terminals (and epsilon) start settled; a rule becomes a
 * candidate for its head once every right-side nonterminal is settled; the
 * best candidate nonterminal is settled each round. Ties take the lowest
 * rule index per head and the lowest nonterminal index per round. With
 * drop_terminal_rules, rules mentioning terminals are discarded first (the
 * epsilon-derivation case).
 */
template <class P>
KnuthOut<P> knuth_best_parse(const Grammar& g, const P& pol, bool drop_terminal_rules) {
    const int n = g.nt_count();
    KnuthOut<P> out;
    out.val.resize(n);
    out.rule.assign(n, -1);

    std::vector<long> remaining(g.rules.size(), 0);
    std::vector<std::vector<int>> uses(n);  // nonterminal -> rules using it (per occurrence)
    for (size_t r = 0; r < g.rules.size(); ++r) {
        bool drop = false;
        long cnt = 0;
        for (const Sym& s : g.rules[r].rhs) {
            if (s.terminal) {
                if (drop_terminal_rules) drop = true;
            } else {
                ++cnt;
            }
        }
        if (drop) {
            remaining[r] = -1;
            continue;
        }
        remaining[r] = cnt;
        for (const Sym& s : g.rules[r].rhs)
            if (!s.terminal) uses[s.id].push_back(static_cast<int>(r));
    }

    std::vector<std::optional<typename P::Value>> cand(n);
    std::vector<int> cand_rule(n, -1);
    std::vector<long> gen(n, 0);

    struct Entry {
        typename P::Value val;
        int nt;
        long gen;
    };
    auto worse = [&pol](const Entry& a, const Entry& b) {
        // priority_queue "less": true when b should surface first
        if (pol.better(b.val, a.val)) return true;
        if (pol.better(a.val, b.val)) return false;
        return b.nt < a.nt;
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> heap(worse);

    auto try_candidate = [&](int r) {
        int head = g.rules[r].lhs;
        if (out.val[head]) return;  // settled values are final
        typename P::Value v = pol.rule_factor(g, r);
        for (const Sym& s : g.rules[r].rhs)
            if (!s.terminal) v = pol.times(v, *out.val[s.id]);
        bool take = !cand[head] || pol.better(v, *cand[head]) ||
                    (!pol.better(*cand[head], v) && r < cand_rule[head]);
        if (take) {
            cand[head] = v;
            cand_rule[head] = r;
            heap.push({*cand[head], head, ++gen[head]});
        }
    };

    for (size_t r = 0; r < g.rules.size(); ++r)
        if (remaining[r] == 0) try_candidate(static_cast<int>(r));

    while (!heap.empty()) {
        Entry e = heap.top();
        heap.pop();
        if (out.val[e.nt] || e.gen != gen[e.nt]) continue;
        out.val[e.nt] = cand[e.nt];
        out.rule[e.nt] = cand_rule[e.nt];
        for (int r : uses[e.nt])
            if (remaining[r] > 0 && --remaining[r] == 0) try_candidate(r);
    }
    return out;
}

struct UnaryPred {
    int prev = -1;  // previous nonterminal on the best path
    int rule = -1;
    int side = -1;  // 0: unit rule; 1: A->BC stepping to B; 2: stepping to C
};

template <class P>
struct UnaryOut {
    int n = 0;
    std::vector<std::optional<typename P::Value>> val;  // [a*n + b]
    std::vector<UnaryPred> pred;                        // [a*n + b]
};

template <class P>
UnaryOut<P> unary_reach_engine(const Grammar& g,
                               const std::vector<std::optional<typename P::Value>>& eps,
                               const P& pol) {
    const int n = g.nt_count();
    struct Edge {
        bool present = false;
        typename P::Value w{};
        int rule = -1;
        int side = -1;
    };
    std::vector<Edge> h(static_cast<size_t>(n) * n);
    auto offer = [&](int a, int b, typename P::Value w, int rule, int side) {
        Edge& e = h[static_cast<size_t>(a) * n + b];
        if (!e.present || pol.better(w, e.w)) e = {true, std::move(w), rule, side};
    };
    for (size_t r = 0; r < g.rules.size(); ++r) {
        const Rule& rule = g.rules[r];
        if (rule.rhs.size() == 1 && !rule.rhs[0].terminal) {
            offer(rule.lhs, rule.rhs[0].id, pol.rule_factor(g, static_cast<int>(r)),
                  static_cast<int>(r), 0);
        } else if (rule.rhs.size() == 2 && !rule.rhs[0].terminal && !rule.rhs[1].terminal) {
            int b = rule.rhs[0].id, c = rule.rhs[1].id;
            if (eps[c])
                offer(rule.lhs, b, pol.times(pol.rule_factor(g, static_cast<int>(r)), *eps[c]),
                      static_cast<int>(r), 1);
            if (eps[b])
                offer(rule.lhs, c, pol.times(pol.rule_factor(g, static_cast<int>(r)), *eps[b]),
                      static_cast<int>(r), 2);
        }
    }

    UnaryOut<P> out;
    out.n = n;
    out.val.resize(static_cast<size_t>(n) * n);
    out.pred.resize(static_cast<size_t>(n) * n);
    for (int src = 0; src < n; ++src) {
        auto* dist = &out.val[static_cast<size_t>(src) * n];
        auto* pred = &out.pred[static_cast<size_t>(src) * n];
        dist[src] = pol.one();  // empty path
        std::vector<bool> settled(n, false);
        for (;;) {
            int u = -1;
            for (int v = 0; v < n; ++v) {
                if (settled[v] || !dist[v]) continue;
                if (u < 0 || pol.better(*dist[v], *dist[u])) u = v;
            }
            if (u < 0) break;
            settled[u] = true;
            for (int v = 0; v < n; ++v) {
                const Edge& e = h[static_cast<size_t>(u) * n + v];
                if (!e.present || settled[v]) continue;
                typename P::Value nv = pol.times(*dist[u], e.w);
                if (!dist[v] || pol.better(nv, *dist[v])) {
                    dist[v] = std::move(nv);
                    pred[v] = {u, e.rule, e.side};
                }
            }
        }
    }
    return out;
}

struct QArg {
    int rule = -1;
    int m = -1;
};

template <class P>
struct DpOut {
    int n_nt = 0;
    int len = 0;
    std::vector<std::optional<typename P::Value>> q, p;  // [(a*len + i-1)*len + j-1]
    std::vector<QArg> q_arg;
    std::vector<int> p_arg;  // chosen descent target B

    size_t idx(int a, int i, int j) const {
        return (static_cast<size_t>(a) * len + (i - 1)) * len + (j - 1);
    }
};

/*
 * The layered chart. q(A,i,1) maximizes over terminal rules for w_i;
 * q(A,i,j>1) over binary rules and split points with both children nonempty;
 * p(A,i,j) composes a unary descent to B with q(B,i,j). Cells inside one
 * layer are independent: the parallel mode computes each layer's q cells,
 * then its p cells, over OpenMP threads; per-cell candidate scans stay
 * index-ordered, so the outcome matches serial execution exactly.
 */
template <class P>
DpOut<P> dp_parse_engine(const Grammar& g, const std::vector<int>& word,
                         const UnaryOut<P>& unary, const P& pol, Exec exec) {
    const int n = g.nt_count();
    const int len = static_cast<int>(word.size());
    DpOut<P> out;
    out.n_nt = n;
    out.len = len;
    size_t cells = static_cast<size_t>(n) * len * len;
    out.q.resize(cells);
    out.p.resize(cells);
    out.q_arg.resize(cells);
    out.p_arg.assign(cells, -1);

    auto rules_of = g.rules_by_lhs();

    auto q_cell = [&](int a, int i, int j) {
        auto& best = out.q[out.idx(a, i, j)];
        auto& arg = out.q_arg[out.idx(a, i, j)];
        if (j == 1) {
            for (int r : rules_of[a]) {
                const Rule& rule = g.rules[r];
                if (rule.rhs.size() != 1 || !rule.rhs[0].terminal ||
                    rule.rhs[0].id != word[i - 1])
                    continue;
                typename P::Value v = pol.rule_factor(g, r);
                if (!best || pol.better(v, *best)) {
                    best = std::move(v);
                    arg = {r, 0};
                }
            }
            return;
        }
        for (int r : rules_of[a]) {
            const Rule& rule = g.rules[r];
            if (rule.rhs.size() != 2 || rule.rhs[0].terminal || rule.rhs[1].terminal) continue;
            int bnt = rule.rhs[0].id, cnt = rule.rhs[1].id;
            for (int m = 1; m < j; ++m) {
                const auto& pb = out.p[out.idx(bnt, i, m)];
                const auto& pc = out.p[out.idx(cnt, i + m, j - m)];
                if (!pb || !pc) continue;
                typename P::Value v = pol.times(pol.rule_factor(g, r), pol.times(*pb, *pc));
                if (!best || pol.better(v, *best)) {
                    best = std::move(v);
                    arg = {r, m};
                }
            }
        }
    };

    auto p_cell = [&](int a, int i, int j) {
        auto& best = out.p[out.idx(a, i, j)];
        auto& arg = out.p_arg[out.idx(a, i, j)];
        for (int b = 0; b < n; ++b) {
            const auto& reach = unary.val[static_cast<size_t>(a) * n + b];
            const auto& qb = out.q[out.idx(b, i, j)];
            if (!reach || !qb) continue;
            typename P::Value v = pol.times(*reach, *qb);
            if (!best || pol.better(v, *best)) {
                best = std::move(v);
                arg = b;
            }
        }
    };

    for (int j = 1; j <= len; ++j) {
        const int imax = len - j + 1;
#ifdef _OPENMP
        if (exec == Exec::Parallel) {
#pragma omp parallel for collapse(2) schedule(dynamic)
            for (int a = 0; a < n; ++a)
                for (int i = 1; i <= imax; ++i) q_cell(a, i, j);
#pragma omp parallel for collapse(2) schedule(dynamic)
            for (int a = 0; a < n; ++a)
                for (int i = 1; i <= imax; ++i) p_cell(a, i, j);
            continue;
        }
#else
        (void)exec;
#endif
        for (int a = 0; a < n; ++a)
            for (int i = 1; i <= imax; ++i) q_cell(a, i, j);
        for (int a = 0; a < n; ++a)
            for (int i = 1; i <= imax; ++i) p_cell(a, i, j);
    }
    return out;
}

// Argmax records, stripped of values; enough to reconstruct witness DAGs.
struct ArgRecords {
    std::vector<int> eps_rule;       // per nonterminal, -1 = none
    int n = 0;                       // nonterminal count
    std::vector<UnaryPred> pred;     // [a*n + b]
    int len = 0;
    std::vector<QArg> q_arg;
    std::vector<int> p_arg;

    size_t idx(int a, int i, int j) const {
        return (static_cast<size_t>(a) * len + (i - 1)) * len + (j - 1);
    }
};

// Shared-arena DAG assembly from recorded choices.
class DagAssembler {
  public:
    DagAssembler(const Grammar& g, const ArgRecords& rec, const std::vector<int>& word)
        : g_(g), rec_(rec), word_(word) {}

    // Epsilon-derivation DAG node for a nonterminal (memoized, shared).
    int eps_node(int nt);
    // Full parse node for the chart cell p(A,i,j) / q(A,i,j).
    int p_node(int a, int i, int j);
    int q_node(int a, int i, int j);
    // Unary-path spine from a down to b ending at `base` (pass -1 for an
    // unexpanded NtLeaf(b)).
    int unary_spine(int a, int b, int base);

    ParseDag take(int root);

  private:
    int emit(DagNode n) {
        nodes_.push_back(std::move(n));
        return static_cast<int>(nodes_.size()) - 1;
    }
    int leaf(int label) { return emit({DagNode::Kind::Leaf, label, -1, {}}); }

    const Grammar& g_;
    const ArgRecords& rec_;
    const std::vector<int>& word_;
    std::vector<DagNode> nodes_;
    std::map<int, int> eps_memo_;
    std::map<std::tuple<int, int, int>, int> p_memo_, q_memo_;
};

}  // namespace scfg::detail
