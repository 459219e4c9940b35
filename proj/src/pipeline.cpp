#include "poeparse/pipeline.hpp"

#include <atomic>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>

#include "engine.hpp"

namespace scfg {

namespace detail {

namespace {

struct Registry {
    std::shared_mutex mu;
    std::unordered_map<std::string, int> ids;
    std::vector<poe::PoE> values;
};

Registry& registry() {
    static Registry r;
    return r;
}

struct CmpCache {
    std::shared_mutex mu;
    std::unordered_map<uint64_t, int> results;  // key packs the two ids
};

CmpCache& cmp_cache() {
    static CmpCache c;
    return c;
}

}  // namespace

int intern_poe(const poe::PoE& p) {
    std::string key = poe::poe_key(p);
    {
        std::shared_lock lock(registry().mu);
        auto it = registry().ids.find(key);
        if (it != registry().ids.end()) return it->second;
    }
    std::unique_lock lock(registry().mu);
    auto [it, fresh] = registry().ids.emplace(std::move(key), 0);
    if (!fresh) return it->second;
    registry().values.push_back(p);
    it->second = static_cast<int>(registry().values.size()) - 1;
    return it->second;
}

const poe::PoE& interned_poe(int id) {
    std::shared_lock lock(registry().mu);
    return registry().values[id];
}

int cmp_interned(int x, int y, const poe::CompareMode& mode) {
    if (x == y) return 0;
    bool flip = x > y;
    if (flip) std::swap(x, y);
    uint64_t key = (static_cast<uint64_t>(x) << 32) | static_cast<uint32_t>(y);
    {
        std::shared_lock lock(cmp_cache().mu);
        auto it = cmp_cache().results.find(key);
        if (it != cmp_cache().results.end()) return flip ? -it->second : it->second;
    }
    poe::PoE a = interned_poe(x), b = interned_poe(y);
    auto outcome = poe::compare(a, b, mode);
    int r;
    switch (outcome.ordering) {
        case poe::Ordering::Less: r = -1; break;
        case poe::Ordering::Equal: r = 0; break;
        case poe::Ordering::Greater: r = 1; break;
        default:
            throw std::runtime_error("pipeline comparison unresolved at the adaptive cap");
    }
    {
        std::unique_lock lock(cmp_cache().mu);
        cmp_cache().results.emplace(key, r);
    }
    return flip ? -r : r;
}

namespace {

std::atomic<bool> g_bound_check{true};

}  // namespace

MaxProbPolicy::Value MaxProbPolicy::check(Value v) const {
    if (exp_bound && g_bound_check.load(std::memory_order_relaxed)) {
        const poe::PoE& p = interned_poe(v);
        Int sum = 0;
        for (const Int& e : p.exponents) sum += abs(e);
        if (sum >= *exp_bound)
            throw std::logic_error("exponent-sum bound violated: " + sum.get_str() +
                                   " >= " + exp_bound->get_str());
    }
    return v;
}

int DagAssembler::eps_node(int nt) {
    auto it = eps_memo_.find(nt);
    if (it != eps_memo_.end()) return it->second;
    int r = rec_.eps_rule[nt];
    if (r < 0) throw std::logic_error("dag: no epsilon derivation recorded for nonterminal");
    const Rule& rule = g_.rules[r];
    std::vector<int> ch;
    if (rule.rhs.empty()) {
        ch.push_back(leaf(-1));
    } else {
        for (const Sym& s : rule.rhs) {
            if (s.terminal) throw std::logic_error("dag: terminal in epsilon derivation");
            ch.push_back(eps_node(s.id));
        }
    }
    int made = emit({DagNode::Kind::Internal, rule.lhs, r, std::move(ch)});
    eps_memo_[nt] = made;
    return made;
}

int DagAssembler::unary_spine(int a, int b, int base) {
    // Collect the best path a -> ... -> b, then build top-down.
    std::vector<UnaryPred> path;  // edge arriving at each node, b-first
    int cur = b;
    while (cur != a) {
        const UnaryPred& pr = rec_.pred[static_cast<size_t>(a) * rec_.n + cur];
        if (pr.prev < 0) throw std::logic_error("dag: broken unary predecessor chain");
        path.push_back(pr);
        cur = pr.prev;
    }
    int node = base >= 0 ? base : emit({DagNode::Kind::NtLeaf, b, -1, {}});
    // path holds edges from b back to a; apply them from the bottom up.
    for (const UnaryPred& pr : path) {
        const Rule& rule = g_.rules[pr.rule];
        std::vector<int> ch;
        if (pr.side == 0) {
            ch = {node};
        } else if (pr.side == 1) {
            ch = {node, eps_node(rule.rhs[1].id)};
        } else {
            ch = {eps_node(rule.rhs[0].id), node};
        }
        node = emit({DagNode::Kind::Internal, rule.lhs, pr.rule, std::move(ch)});
    }
    return node;
}

int DagAssembler::q_node(int a, int i, int j) {
    auto key = std::make_tuple(a, i, j);
    auto it = q_memo_.find(key);
    if (it != q_memo_.end()) return it->second;
    const QArg& arg = rec_.q_arg[rec_.idx(a, i, j)];
    if (arg.rule < 0) throw std::logic_error("dag: missing chart argmax");
    const Rule& rule = g_.rules[arg.rule];
    int made;
    if (j == 1) {
        int lf = leaf(word_[i - 1]);
        made = emit({DagNode::Kind::Internal, a, arg.rule, {lf}});
    } else {
        int left = p_node(rule.rhs[0].id, i, arg.m);
        int right = p_node(rule.rhs[1].id, i + arg.m, j - arg.m);
        made = emit({DagNode::Kind::Internal, a, arg.rule, {left, right}});
    }
    q_memo_[key] = made;
    return made;
}

int DagAssembler::p_node(int a, int i, int j) {
    auto key = std::make_tuple(a, i, j);
    auto it = p_memo_.find(key);
    if (it != p_memo_.end()) return it->second;
    int b = rec_.p_arg[rec_.idx(a, i, j)];
    if (b < 0) throw std::logic_error("dag: missing chart descent");
    int base = q_node(b, i, j);
    int made = unary_spine(a, b, base);
    p_memo_[key] = made;
    return made;
}

ParseDag DagAssembler::take(int root) {
    ParseDag d;
    d.nodes = std::move(nodes_);
    d.root = root;
    return d;
}

}  // namespace detail

void set_exponent_bound_check(bool enabled) {
    detail::g_bound_check.store(enabled, std::memory_order_relaxed);
}

bool exponent_bound_check_enabled() {
    return detail::g_bound_check.load(std::memory_order_relaxed);
}

namespace {

using detail::ArgRecords;
using detail::DagAssembler;
using detail::MaxProbPolicy;

// 2 n^2 2^n with n the grammar's nonterminal count.
Int exponent_bound_for(const Grammar& g) {
    long n = g.nt_count();
    return 2 * Int(n) * Int(n) * poe::pow2(n);
}

MaxProbPolicy policy_for(const Grammar& g, const PipelineOptions& opt) {
    MaxProbPolicy pol;
    pol.mode = opt.mode;
    pol.exp_bound = exponent_bound_for(g);
    return pol;
}

Prob to_prob(const std::optional<int>& v) {
    if (!v) return Prob::none();
    return Prob::of(detail::interned_poe(*v));
}

}  // namespace

EpsResult max_eps_probs(const Grammar& g, const PipelineOptions& opt) {
    validate(g);
    MaxProbPolicy pol = policy_for(g, opt);
    auto kn = detail::knuth_best_parse(g, pol, /*drop_terminal_rules=*/true);

    EpsResult out;
    out.prob.reserve(g.nt_count());
    out.dag.resize(g.nt_count());
    for (int a = 0; a < g.nt_count(); ++a) out.prob.push_back(to_prob(kn.val[a]));
    if (opt.build_dags) {
        ArgRecords rec;
        rec.eps_rule = kn.rule;
        rec.n = g.nt_count();
        std::vector<int> empty_word;
        for (int a = 0; a < g.nt_count(); ++a) {
            if (out.prob[a].zero) continue;
            DagAssembler asmb(g, rec, empty_word);
            int root = asmb.eps_node(a);
            ParseDag d = asmb.take(root);
            d.prob = out.prob[a].value;
            out.dag[a] = std::move(d);
        }
    }
    return out;
}

UnaryReachResult max_unary_reach(const SnfGrammar& snf, const EpsResult& eps,
                                 const PipelineOptions& opt) {
    const Grammar& g = snf.g;
    const int n = g.nt_count();
    MaxProbPolicy pol = policy_for(g, opt);

    std::vector<std::optional<int>> eps_val(n);
    std::vector<int> eps_rule(n, -1);
    // Recover the epsilon argmax rules for DAG splicing by re-running the
    // settling; the values must match the supplied eps result.
    auto kn = detail::knuth_best_parse(g, pol, true);
    for (int a = 0; a < n; ++a) {
        eps_val[a] = kn.val[a];
        eps_rule[a] = kn.rule[a];
        if (eps_val[a].has_value() == eps.prob[a].zero)
            throw std::invalid_argument("max_unary_reach: eps result disagrees with grammar");
    }

    auto un = detail::unary_reach_engine(g, eps_val, pol);

    UnaryReachResult out;
    out.nt_count = n;
    out.prob.reserve(static_cast<size_t>(n) * n);
    out.dag.resize(static_cast<size_t>(n) * n);
    for (size_t i = 0; i < un.val.size(); ++i) out.prob.push_back(to_prob(un.val[i]));
    if (opt.build_dags) {
        ArgRecords rec;
        rec.eps_rule = eps_rule;
        rec.n = n;
        rec.pred = un.pred;
        std::vector<int> empty_word;
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                size_t idx = static_cast<size_t>(a) * n + b;
                if (out.prob[idx].zero) continue;
                DagAssembler asmb(g, rec, empty_word);
                int root = asmb.unary_spine(a, b, -1);
                ParseDag d = asmb.take(root);
                d.prob = out.prob[idx].value;
                out.dag[idx] = std::move(d);
            }
        }
    }
    return out;
}

MaxParseResult max_parse(const SnfGrammar& snf, const std::vector<int>& word,
                         const PipelineOptions& opt) {
    const Grammar& g = snf.g;
    const int n = g.nt_count();
    MaxParseResult out;

    if (word.empty()) {
        // The empty word is the epsilon-derivation problem for the start symbol.
        EpsResult eps = max_eps_probs(g, opt);
        out.prob = eps.prob[g.start];
        if (opt.build_dags && !out.prob.zero) out.dag = std::move(eps.dag[g.start]);
        if (opt.keep_tables) {
            ParseTables t;
            t.nt_count = n;
            t.word_len = 0;
            t.eps = eps.prob;
            out.tables = std::move(t);
        }
        return out;
    }

    MaxProbPolicy pol = policy_for(g, opt);
    auto kn = detail::knuth_best_parse(g, pol, true);
    auto un = detail::unary_reach_engine(g, kn.val, pol);
    auto dp = detail::dp_parse_engine(g, word, un, pol, opt.exec);

    const int len = static_cast<int>(word.size());
    out.prob = to_prob(dp.p[dp.idx(g.start, 1, len)]);

    if (opt.build_dags && !out.prob.zero) {
        ArgRecords rec;
        rec.eps_rule = kn.rule;
        rec.n = n;
        rec.pred = un.pred;
        rec.len = len;
        rec.q_arg = dp.q_arg;
        rec.p_arg = dp.p_arg;
        DagAssembler asmb(g, rec, word);
        int root = asmb.p_node(g.start, 1, len);
        ParseDag d = asmb.take(root);
        d.prob = out.prob.value;
        out.dag = std::move(d);
    }
    if (opt.keep_tables) {
        ParseTables t;
        t.nt_count = n;
        t.word_len = len;
        for (int a = 0; a < n; ++a) t.eps.push_back(to_prob(kn.val[a]));
        for (size_t i = 0; i < un.val.size(); ++i) t.unary.push_back(to_prob(un.val[i]));
        t.q.reserve(dp.q.size());
        t.p.reserve(dp.p.size());
        for (const auto& v : dp.q) t.q.push_back(to_prob(v));
        for (const auto& v : dp.p) t.p.push_back(to_prob(v));
        out.tables = std::move(t);
    }
    return out;
}

ProductResult product_construction(const SnfGrammar& snf, const std::vector<int>& word,
                                   const PipelineOptions& opt) {
    const Grammar& g = snf.g;
    const int states = static_cast<int>(word.size()) + 1;
    const int n = g.nt_count();

    ProductResult out;
    Grammar& pg = out.product;
    pg.terminals = g.terminals;
    auto triple = [&](int s, int a, int s2) {
        return (static_cast<int>(s) * states + s2) * n + a;
    };
    for (int s = 0; s < states; ++s)
        for (int s2 = 0; s2 < states; ++s2)
            for (int a = 0; a < n; ++a)
                pg.nonterminals.push_back("(" + std::to_string(s) + "," + g.nonterminals[a] + "," +
                                          std::to_string(s2) + ")");
    pg.start = triple(0, g.start, states - 1);
    out.root_nt = pg.start;

    for (size_t r = 0; r < g.rules.size(); ++r) {
        const Rule& rule = g.rules[r];
        if (rule.rhs.size() == 2 && !rule.rhs[0].terminal && !rule.rhs[1].terminal) {
            for (int s = 0; s < states; ++s)
                for (int s2 = 0; s2 < states; ++s2)
                    for (int mid = 0; mid < states; ++mid)
                        pg.rules.push_back({triple(s, rule.lhs, s2),
                                            {{false, triple(s, rule.rhs[0].id, mid)},
                                             {false, triple(mid, rule.rhs[1].id, s2)}},
                                            rule.prob});
        } else if (rule.rhs.size() == 1 && !rule.rhs[0].terminal) {
            for (int s = 0; s < states; ++s)
                for (int s2 = 0; s2 < states; ++s2)
                    pg.rules.push_back({triple(s, rule.lhs, s2),
                                        {{false, triple(s, rule.rhs[0].id, s2)}},
                                        rule.prob});
        } else if (rule.rhs.size() == 1 && rule.rhs[0].terminal) {
            // terminal transition exists only between consecutive states
            for (int s = 0; s + 1 < states; ++s)
                if (word[s] == rule.rhs[0].id)
                    pg.rules.push_back(
                        {triple(s, rule.lhs, s + 1), {{true, rule.rhs[0].id}}, rule.prob});
        } else if (rule.rhs.empty()) {
            for (int s = 0; s < states; ++s)
                pg.rules.push_back({triple(s, rule.lhs, s), {}, rule.prob});
        } else {
            throw std::invalid_argument("product_construction: grammar is not in SNF");
        }
    }
    validate(pg, /*weighted=*/true);

    MaxProbPolicy pol;
    pol.mode = opt.mode;
    pol.exp_bound = exponent_bound_for(pg);
    auto kn = detail::knuth_best_parse(pg, pol, /*drop_terminal_rules=*/false);
    out.prob = to_prob(kn.val[out.root_nt]);
    return out;
}

}  // namespace scfg
