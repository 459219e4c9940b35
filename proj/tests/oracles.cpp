#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "poeparse/logform.hpp"

namespace oracles {

Rat value_iteration_max_parse(const scfg::Grammar& g, const std::vector<int>& word) {
    const int n = g.nt_count();
    const int len = static_cast<int>(word.size());
    // V[a][i][j]: best probability that A derives w[i .. i+j), j possibly 0.
    auto idx = [&](int a, int i, int j) {
        return (static_cast<size_t>(a) * (len + 1) + i) * (len + 1) + j;
    };
    std::vector<Rat> v(static_cast<size_t>(n) * (len + 1) * (len + 1), Rat(0));

    // Best allocation of the span to the rule's symbols, recursing over the
    // right side with a moving split point, against the previous table.
    std::function<Rat(const scfg::Rule&, size_t, int, int, const std::vector<Rat>&)> alloc =
        [&](const scfg::Rule& r, size_t k, int i, int j, const std::vector<Rat>& prev) -> Rat {
        if (k == r.rhs.size()) return j == 0 ? Rat(1) : Rat(0);
        const scfg::Sym& s = r.rhs[k];
        if (s.terminal) {
            if (j == 0 || word[i] != s.id) return Rat(0);
            return alloc(r, k + 1, i + 1, j - 1, prev);
        }
        Rat best(0);
        for (int take = 0; take <= j; ++take) {
            const Rat& sub = prev[idx(s.id, i, take)];
            if (sub == 0) continue;
            Rat rest = alloc(r, k + 1, i + take, j - take, prev);
            if (rest == 0) continue;
            Rat cand = sub * rest;
            if (cand > best) best = cand;
        }
        return best;
    };

    for (int round = 0;; ++round) {
        if (round > 10000) throw std::runtime_error("value iteration failed to converge");
        std::vector<Rat> next = v;
        bool changed = false;
        for (const scfg::Rule& r : g.rules) {
            for (int i = 0; i <= len; ++i) {
                for (int j = 0; i + j <= len; ++j) {
                    Rat body = alloc(r, 0, i, j, v);
                    if (body == 0) continue;
                    Rat cand = r.prob * body;
                    Rat& cell = next[idx(r.lhs, i, j)];
                    if (cand > cell) {
                        cell = cand;
                        changed = true;
                    }
                }
            }
        }
        v = std::move(next);
        if (!changed) break;
    }
    return v[idx(g.start, 0, len)];
}

namespace {

// Partial tree during enumeration.
struct Partial {
    scfg::ParseDag dag;
    std::vector<int> yield;
    std::vector<int> childmarks;  // root node of each placed right-side symbol
    Rat prob = 1;
    int internal = 0;
};

}  // namespace

std::vector<EnumTree> enumerate_parse_trees(const scfg::Grammar& g, int root, int max_internal) {
    auto by_lhs = g.rules_by_lhs();

    std::function<std::vector<Partial>(int, int)> expand = [&](int a, int budget) {
        std::vector<Partial> out;
        if (budget <= 0) return out;
        for (int r : by_lhs[a]) {
            const scfg::Rule& rule = g.rules[r];
            std::vector<Partial> fronts;
            {
                Partial seed;
                seed.internal = 1;
                seed.prob = rule.prob;
                fronts.push_back(std::move(seed));
            }
            for (const scfg::Sym& s : rule.rhs) {
                std::vector<Partial> grown;
                for (const Partial& f : fronts) {
                    if (s.terminal) {
                        Partial nf = f;
                        nf.dag.nodes.push_back({scfg::DagNode::Kind::Leaf, s.id, -1, {}});
                        nf.childmarks.push_back(static_cast<int>(nf.dag.nodes.size()) - 1);
                        nf.yield.push_back(s.id);
                        grown.push_back(std::move(nf));
                    } else {
                        for (const Partial& sub : expand(s.id, budget - f.internal)) {
                            Partial nf = f;
                            int base = static_cast<int>(nf.dag.nodes.size());
                            for (const scfg::DagNode& nd : sub.dag.nodes) {
                                scfg::DagNode copy = nd;
                                for (int& c : copy.children) c += base;
                                nf.dag.nodes.push_back(std::move(copy));
                            }
                            nf.yield.insert(nf.yield.end(), sub.yield.begin(), sub.yield.end());
                            nf.prob *= sub.prob;
                            nf.internal += sub.internal;
                            nf.childmarks.push_back(base + sub.dag.root);
                            grown.push_back(std::move(nf));
                        }
                    }
                }
                fronts = std::move(grown);
            }
            for (Partial& f : fronts) {
                if (f.internal > budget) continue;
                std::vector<int> ch = f.childmarks;
                if (rule.rhs.empty()) {
                    f.dag.nodes.push_back({scfg::DagNode::Kind::Leaf, -1, -1, {}});
                    ch = {static_cast<int>(f.dag.nodes.size()) - 1};
                }
                f.dag.nodes.push_back({scfg::DagNode::Kind::Internal, a, r, std::move(ch)});
                f.dag.root = static_cast<int>(f.dag.nodes.size()) - 1;
                f.childmarks.clear();
                out.push_back(std::move(f));
            }
        }
        return out;
    };

    std::vector<EnumTree> result;
    for (Partial& p : expand(root, max_internal)) {
        EnumTree t;
        p.dag.prob = scfg::dag_poe_prob(p.dag, g);
        t.tree = std::move(p.dag);
        t.yield = std::move(p.yield);
        t.prob = std::move(p.prob);
        result.push_back(std::move(t));
    }
    return result;
}

Rat cyk_max(const scfg::Grammar& g, const std::vector<int>& word) {
    const int n = g.nt_count();
    const int len = static_cast<int>(word.size());
    if (len == 0) return Rat(0);
    auto idx = [&](int a, int i, int j) {  // span w[i..i+j), j >= 1
        return (static_cast<size_t>(a) * (len + 1) + i) * (len + 1) + j;
    };
    std::vector<Rat> t(static_cast<size_t>(n) * (len + 1) * (len + 1), Rat(0));
    for (const scfg::Rule& r : g.rules) {
        if (r.rhs.size() == 1 && r.rhs[0].terminal)
            for (int i = 0; i < len; ++i)
                if (word[i] == r.rhs[0].id && r.prob > t[idx(r.lhs, i, 1)])
                    t[idx(r.lhs, i, 1)] = r.prob;
    }
    for (int j = 2; j <= len; ++j)
        for (int i = 0; i + j <= len; ++i)
            for (const scfg::Rule& r : g.rules) {
                if (r.rhs.size() != 2 || r.rhs[0].terminal || r.rhs[1].terminal) continue;
                for (int m = 1; m < j; ++m) {
                    const Rat& lb = t[idx(r.rhs[0].id, i, m)];
                    const Rat& rb = t[idx(r.rhs[1].id, i + m, j - m)];
                    if (lb == 0 || rb == 0) continue;
                    Rat cand = r.prob * lb * rb;
                    if (cand > t[idx(r.lhs, i, j)]) t[idx(r.lhs, i, j)] = cand;
                }
            }
    return t[idx(g.start, 0, len)];
}

std::vector<std::pair<Int, Int>> convergents_log3_log5(int count) {
    // 400-bit approximations keep convergents with q below ~2^150 trustworthy.
    Rat l3 = poe::log_int(3, 400).value;
    Rat l5 = poe::log_int(5, 400).value;
    Rat x = l3 / l5;
    std::vector<std::pair<Int, Int>> out;
    Int hm2 = 0, hm1 = 1;  // numerator recurrence
    Int km2 = 1, km1 = 0;  // denominator recurrence
    for (int k = 0; k < count;) {
        Int a = x.get_num() / x.get_den();
        Int h = a * hm1 + hm2, kq = a * km1 + km2;
        hm2 = hm1;
        km2 = km1;
        hm1 = h;
        km1 = kq;
        if (h >= 1 && kq >= 1) {
            out.emplace_back(h, kq);
            ++k;
        }
        Rat frac = x - Rat(a);
        if (frac == 0) break;
        x = Rat(1) / frac;
    }
    return out;
}

namespace {

double h_ln_b(const poe::LinearForm& f, double* h_out) {
    double h = 1.0;
    for (const Int& a : f.a) h *= std::max(std::log(a.get_d()), 1.0);
    double maxb = 0;
    for (const Int& b : f.b) maxb = std::max(maxb, std::fabs(b.get_d()));
    *h_out = h;
    return maxb <= 2 ? 1.0 : std::log(maxb);
}

}  // namespace

double bw_gap_ref(const poe::LinearForm& f) {
    int n = static_cast<int>(f.a.size());
    double c = 18.0;
    for (int i = 2; i <= n + 1; ++i) c *= i;  // (n+1)!
    c *= std::pow(static_cast<double>(n), n + 1);
    c *= std::pow(32.0, n + 2);
    c *= std::log(2.0 * n);
    double h;
    double lnB = h_ln_b(f, &h);
    return std::ceil(c * h * lnB / std::log(2.0));
}

double matveev_gap_ref(const poe::LinearForm& f) {
    int n = static_cast<int>(f.a.size());
    double c = 2.9 * std::pow(2.0 * std::exp(1.0), 2.0 * n + 6) * std::pow(n + 2.0, 4.5);
    double h;
    double lnB = h_ln_b(f, &h);
    return std::ceil(c * h * lnB / std::log(2.0));
}

poe::PoE random_poe(std::mt19937_64& rng, int max_factors, long max_base, long max_exp) {
    std::uniform_int_distribution<int> nf(1, max_factors);
    std::uniform_int_distribution<long> base(2, max_base);
    std::uniform_int_distribution<long> expo(1, max_exp);
    std::uniform_int_distribution<int> sign(0, 1);
    poe::PoE x;
    int k = nf(rng);
    for (int i = 0; i < k; ++i) {
        x.bases.emplace_back(base(rng));
        long e = expo(rng);
        x.exponents.emplace_back(sign(rng) ? e : -e);
    }
    return poe::normalize(x);
}

std::pair<poe::PoE, poe::PoE> random_equal_pair(std::mt19937_64& rng, long max_base) {
    static const long primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};
    std::uniform_int_distribution<int> nprimes(2, 5);
    std::uniform_int_distribution<int> pidx(0, 9);
    std::uniform_int_distribution<long> expo(1, 40);
    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_int_distribution<int> group(1, 3);

    // One signed prime-power multiset, grouped two different ways into bases.
    int k = nprimes(rng);
    std::vector<std::pair<long, long>> factors;  // (prime, exponent > 0)
    for (int i = 0; i < k; ++i) factors.emplace_back(primes[pidx(rng)], expo(rng));
    long s = coin(rng) ? 1 : -1;

    auto build = [&](poe::PoE& out) {
        std::vector<std::pair<long, long>> pool = factors;
        std::shuffle(pool.begin(), pool.end(), rng);
        while (!pool.empty()) {
            // Merge up to `take` trailing entries into one base at their
            // common exponent; exponent leftovers go back into the pool.
            int take = std::min<int>(group(rng), static_cast<int>(pool.size()));
            std::vector<std::pair<long, long>> in;
            Int merged = 1;
            for (int t = 0; t < take; ++t) {
                auto cand = pool.back();
                if (!in.empty() && merged * cand.first > max_base) break;
                pool.pop_back();
                merged *= cand.first;
                in.push_back(cand);
            }
            long common = in[0].second;
            for (auto& [p, e] : in) common = std::min(common, e);
            out.bases.push_back(merged);
            out.exponents.push_back(s * common);
            for (auto& [p, e] : in)
                if (e > common) pool.emplace_back(p, e - common);
        }
    };

    poe::PoE x, y;
    build(x);
    build(y);
    return {poe::normalize(x), poe::normalize(y)};
}

scfg::Grammar random_grammar(std::mt19937_64& rng, int nts, int terms,
                             const std::vector<Rat>& probs) {
    scfg::Grammar g;
    for (int i = 0; i < nts; ++i) g.nonterminals.push_back("N" + std::to_string(i));
    for (int i = 0; i < terms; ++i)
        g.terminals.push_back(std::string(1, static_cast<char>('a' + i)));
    g.start = 0;
    std::uniform_int_distribution<int> nrules(1, 3);
    std::uniform_int_distribution<int> rlen(0, 3);
    std::uniform_int_distribution<int> nt(0, nts - 1);
    std::uniform_int_distribution<int> tm(0, terms - 1);
    std::uniform_int_distribution<int> kind(0, 2);
    std::uniform_int_distribution<size_t> pr(0, probs.size() - 1);
    for (int a = 0; a < nts; ++a) {
        Rat sum(0);
        int want = nrules(rng);
        for (int r = 0; r < want; ++r) {
            Rat p = probs[pr(rng)];
            if (sum + p > 1) continue;
            sum += p;
            scfg::Rule rule;
            rule.lhs = a;
            int len = rlen(rng);
            for (int i = 0; i < len; ++i) {
                if (kind(rng) == 0)
                    rule.rhs.push_back({true, tm(rng)});
                else
                    rule.rhs.push_back({false, nt(rng)});
            }
            rule.prob = p;
            g.rules.push_back(std::move(rule));
        }
    }
    validate(g);
    return g;
}

}  // namespace oracles
