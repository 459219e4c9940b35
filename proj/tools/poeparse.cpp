// Command-line surface: equality / comparison of PoE numbers, circuit
// conversion, and maximum-probability parsing with DAG output.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "poeparse/circuit.hpp"
#include "poeparse/compare.hpp"
#include "poeparse/dag.hpp"
#include "poeparse/pipeline.hpp"

namespace {

// Exit codes: 0 success (EQUAL / resolved ordering / parse found),
// 1 NOT-EQUAL or NO-PARSE, 2 input or usage error, 3 UNRESOLVED.
constexpr int kExitNotEqual = 1;
constexpr int kExitNoParse = 1;
constexpr int kExitError = 2;
constexpr int kExitUnresolved = 3;

struct Output {
    bool lines = false;  // machine-readable prefix-tagged lines
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << content;
}

void print_certificate(const poe::Certificate& c, const Output& fmt) {
    (void)fmt;
    std::cout << "mode: " << c.mode << "\n";
    std::cout << "bits: " << c.precision_bits << "\n";
    std::cout << "gap-bits: " << c.gap_bits.get_str() << "\n";
    if (c.value) std::cout << "value: " << c.value->get_str() << "\n";
}

struct ModeFlags {
    std::string mode = "adaptive";
    std::string eps = "1";
    std::string c_const = "1";
    std::string k2_const = "1";
    long max_bits = 1 << 20;
    long gap_cap_bits = 31;

    poe::CompareMode build() const {
        if (mode == "adaptive") return poe::CompareMode::adaptive(max_bits);
        if (mode == "bw" || mode == "matveev")
            return poe::CompareMode::unconditional(poe::pow2(gap_cap_bits));
        if (mode == "lw")
            return poe::CompareMode::lang_waldschmidt(poe::rat_from_string(eps),
                                                      poe::rat_from_string(c_const));
        if (mode == "abc") return poe::CompareMode::baker_abc(poe::rat_from_string(k2_const));
        throw std::runtime_error("unknown mode: " + mode);
    }
};

void add_mode_flags(CLI::App* cmd, ModeFlags& mf) {
    cmd->add_option("--mode", mf.mode, "certification regime")
        ->check(CLI::IsMember({"adaptive", "bw", "matveev", "lw", "abc"}));
    cmd->add_option("--eps", mf.eps, "Lang-Waldschmidt epsilon (default 1)");
    cmd->add_option("--c-const", mf.c_const, "Lang-Waldschmidt C(eps) constant (default 1)");
    cmd->add_option("--k2-const", mf.k2_const, "refined-ABC K'' constant (default 1)");
    cmd->add_option("--max-bits", mf.max_bits, "adaptive precision cap in bits");
    cmd->add_option("--gap-cap-bits", mf.gap_cap_bits,
                    "refuse unconditional gaps above 2^this bits");
}

int cmd_equal(const std::string& lhs, const std::string& rhs, const Output& fmt) {
    poe::PoE x = poe::poe_from_text(lhs);
    poe::PoE y = poe::poe_from_text(rhs);
    bool eq = poe::equals(x, y);
    if (fmt.lines)
        std::cout << "verdict: " << (eq ? "EQUAL" : "NOT-EQUAL") << "\n";
    else
        std::cout << (eq ? "EQUAL" : "NOT-EQUAL") << "\n";
    return eq ? 0 : kExitNotEqual;
}

int cmd_compare(const std::string& lhs, const std::string& rhs, const ModeFlags& mf,
                const Output& fmt) {
    poe::PoE x = poe::poe_from_text(lhs);
    poe::PoE y = poe::poe_from_text(rhs);
    poe::CompareOutcome out = poe::compare(x, y, mf.build());
    const char* verdict = poe::ordering_name(out.ordering);
    if (fmt.lines)
        std::cout << "verdict: " << verdict << "\n";
    else
        std::cout << verdict << "\n";
    print_certificate(out.certificate, fmt);
    return out.ordering == poe::Ordering::Unresolved ? kExitUnresolved : 0;
}

int cmd_parse(const std::string& grammar_path, const std::string& word_text, bool exact,
              const std::string& approx_eps, const std::string& dag_out, bool serial,
              const ModeFlags& mf, const Output& fmt) {
    scfg::Grammar g = scfg::grammar_from_text(read_file(grammar_path));
    std::vector<int> word = scfg::tokenize_word(g, word_text);

    scfg::PipelineOptions opt;
    opt.mode = mf.build();
    opt.exec = serial ? scfg::Exec::Serial : scfg::Exec::Parallel;

    if (exact) {
        scfg::SnfGrammar snf = scfg::to_snf(g);
        scfg::MaxParseResult res = scfg::max_parse(snf, word, opt);
        if (res.prob.zero) {
            std::cout << (fmt.lines ? "verdict: NO-PARSE" : "NO-PARSE") << "\n";
            return kExitNoParse;
        }
        // Report the parse over the original grammar.
        scfg::ParseDag dag = scfg::dag_from_snf(*res.dag, snf, g);
        if (fmt.lines)
            std::cout << "prob: " << poe::poe_to_text(res.prob.value) << "\n";
        else
            std::cout << "prob = " << poe::poe_to_text(res.prob.value) << "\n";
        write_output(dag_out, scfg::dag_to_text(dag, g));
        return 0;
    }

    poe::Rat eps = poe::rat_from_string(approx_eps);
    scfg::ApproxResult res = scfg::approx_max_parse(g, word, eps, opt);
    if (!res.member) {
        std::cout << (fmt.lines ? "verdict: NO-PARSE" : "NO-PARSE") << "\n";
        return kExitNoParse;
    }
    std::string v = poe::rat_to_exact_decimal(res.log2_prob);
    if (fmt.lines) {
        std::cout << "log2-prob: " << v << "\n";
        std::cout << "bits: " << res.precision_bits << "\n";
    } else {
        std::cout << "log2-prob = " << v << "\n";
        std::cout << "weight precision: " << res.precision_bits << " bits\n";
    }
    write_output(dag_out, scfg::dag_to_text(*res.dag, g));
    return 0;
}

int cmd_convert(const std::string& circuit_to_poe, const std::string& poe_to_circuit,
                const std::string& out_path) {
    if (!circuit_to_poe.empty()) {
        poe::Circuit c = poe::circuit_from_text(read_file(circuit_to_poe));
        write_output(out_path, poe::poe_to_text(poe::from_circuit(c)) + "\n");
        return 0;
    }
    poe::PoE x = poe::poe_from_text(read_file(poe_to_circuit));
    write_output(out_path, poe::circuit_to_text(poe::to_circuit(x)));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact arithmetic and comparison on product-of-exponentials numbers, "
                 "and maximum-probability parsing of stochastic context-free grammars"};
    app.require_subcommand(1);

    Output fmt;
    std::string format = "text";
    app.add_option("--format", format, "output format")
        ->check(CLI::IsMember({"text", "lines"}));
    bool debug_assert = true;
    app.add_flag("--debug-assert,!--no-debug-assert", debug_assert,
                 "runtime exponent-sum bound checking (default on)");

    std::string lhs, rhs;
    ModeFlags eq_mf, cmp_mf, parse_mf;

    auto* eq = app.add_subcommand("equal", "test two PoE expressions for equality");
    eq->add_option("lhs", lhs, "left PoE expression")->required();
    eq->add_option("rhs", rhs, "right PoE expression")->required();

    auto* cmp = app.add_subcommand("compare", "three-way comparison of two PoE expressions");
    cmp->add_option("lhs", lhs, "left PoE expression")->required();
    cmp->add_option("rhs", rhs, "right PoE expression")->required();
    add_mode_flags(cmp, cmp_mf);

    std::string grammar_path, word_text, approx_eps, dag_out;
    bool exact = false, serial = false;
    auto* parse = app.add_subcommand("parse", "maximum-probability parse of a string");
    parse->add_option("grammar", grammar_path, "grammar file")->required();
    parse->add_option("word", word_text, "terminal string (may be empty)")->required();
    auto* exact_flag = parse->add_flag("--exact", exact, "exact PoE probability");
    auto* approx_opt = parse->add_option("--approx", approx_eps, "approximate to within eps (log2)");
    exact_flag->excludes(approx_opt);
    parse->add_option("--dag-out", dag_out, "write the parse DAG to this file");
    parse->add_flag("--serial", serial, "disable the parallel chart");
    add_mode_flags(parse, parse_mf);

    std::string c2p, p2c, out_path;
    auto* conv = app.add_subcommand("convert", "convert between PoE and circuit text");
    auto* c2p_opt = conv->add_option("--circuit-to-poe", c2p, "circuit file to PoE");
    auto* p2c_opt = conv->add_option("--poe-to-circuit", p2c, "PoE file to circuit");
    c2p_opt->excludes(p2c_opt);
    conv->add_option("--out", out_path, "output file (default stdout)");

    CLI11_PARSE(app, argc, argv);
    fmt.lines = format == "lines";
    scfg::set_exponent_bound_check(debug_assert);

    try {
        if (app.got_subcommand(eq)) return cmd_equal(lhs, rhs, fmt);
        if (app.got_subcommand(cmp)) return cmd_compare(lhs, rhs, cmp_mf, fmt);
        if (app.got_subcommand(parse)) {
            if (!exact && approx_eps.empty())
                throw std::runtime_error("parse requires --exact or --approx <eps>");
            return cmd_parse(grammar_path, word_text, exact, approx_eps, dag_out, serial,
                             parse_mf, fmt);
        }
        if (app.got_subcommand(conv)) {
            if (c2p.empty() == p2c.empty())
                throw std::runtime_error(
                    "convert requires exactly one of --circuit-to-poe / --poe-to-circuit");
            return cmd_convert(c2p, p2c, out_path);
        }
    } catch (const poe::OverflowGuard& e) {
        std::cerr << "error: " << e.what() << "\n"
                  << "hint: the unconditional gap bound is astronomically weak here; "
                     "use --mode adaptive\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
