#include "poeparse/logform.hpp"
#include "poeparse/pipeline.hpp"

#include "engine.hpp"

namespace scfg {

namespace {

// Smallest t with 2^t >= x (x > 0).
long ceil_log2_rat(const Rat& x) {
    long t = poe::bit_length(x.get_num()) - poe::bit_length(x.get_den());
    auto holds = [&](long e) {
        if (e >= 0) return x.get_den() * poe::pow2(e) >= x.get_num();
        return x.get_den() >= x.get_num() * poe::pow2(-e);
    };
    while (!holds(t)) ++t;
    while (holds(t - 1)) --t;
    return t;
}

}  // namespace

ApproxResult approx_max_parse(const Grammar& g, const std::vector<int>& word, const Rat& eps,
                              const PipelineOptions& opt) {
    if (eps <= 0 || eps >= 1)
        throw std::invalid_argument("approx_max_parse: eps must be in (0, 1)");
    validate(g);
    SnfGrammar snf = to_snf(g);
    const Grammar& sg = snf.g;
    const long n = sg.nt_count();

    // Weight precision: 2n + log2(1/eps) plus guard bits, raised where
    // needed so that 2 * (2 n^2 2^n) * 2^-k is always below eps.
    long l2e = ceil_log2_rat(Rat(1) / eps);
    long log_n = poe::ceil_log2(Int(n));
    long k = std::max(2 * n + l2e + 2, n + 2 * log_n + l2e + 4);

    // Edge weights -log2 p(r), approximated to within 2^-k each and clamped
    // to >= 0 (true weights are nonnegative; clamping never hurts the bound).
    std::vector<Rat> weights(sg.rules.size());
    for (size_t r = 0; r < sg.rules.size(); ++r) {
        const Rat& p = sg.rules[r].prob;
        Rat w = poe::log2_int_approx(p.get_den(), k + 1) -
                poe::log2_int_approx(p.get_num(), k + 1);
        if (w < 0) w = 0;
        weights[r] = w;
    }

    detail::MinWeightPolicy pol;
    pol.rule_weights = &weights;

    auto kn = detail::knuth_best_parse(sg, pol, /*drop_terminal_rules=*/true);

    ApproxResult out;
    out.precision_bits = k;

    detail::ArgRecords rec;
    rec.eps_rule = kn.rule;
    rec.n = static_cast<int>(n);

    std::optional<Rat> total;
    std::optional<ParseDag> snf_dag;

    if (word.empty()) {
        total = kn.val[sg.start];
        if (total && opt.build_dags) {
            std::vector<int> empty_word;
            detail::DagAssembler asmb(sg, rec, empty_word);
            int root = asmb.eps_node(sg.start);
            snf_dag = asmb.take(root);
        }
    } else {
        auto un = detail::unary_reach_engine(sg, kn.val, pol);
        auto dp = detail::dp_parse_engine(sg, word, un, pol, opt.exec);
        const int len = static_cast<int>(word.size());
        total = dp.p[dp.idx(sg.start, 1, len)];
        if (total && opt.build_dags) {
            rec.pred = un.pred;
            rec.len = len;
            rec.q_arg = std::move(dp.q_arg);
            rec.p_arg = std::move(dp.p_arg);
            detail::DagAssembler asmb(sg, rec, word);
            int root = asmb.p_node(sg.start, 1, len);
            snf_dag = asmb.take(root);
        }
    }

    out.member = total.has_value();
    if (!out.member) return out;
    out.log2_prob = -*total;

    if (snf_dag) {
        snf_dag->prob = dag_poe_prob(*snf_dag, sg);
        ParseDag mapped = dag_from_snf(*snf_dag, snf, g);
        out.dag_prob = mapped.prob;
        out.dag = std::move(mapped);
    }
    return out;
}

}  // namespace scfg
