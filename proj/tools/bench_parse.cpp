// Benchmark: exact and approximate chart parsing, serial vs OpenMP, on a
// family of synthetic grammars. Verifies that both execution modes produce
// identical probabilities and identical DAGs before reporting timings.

#include <chrono>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "poeparse/dag.hpp"
#include "poeparse/pipeline.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

scfg::Grammar make_grammar(int nts, std::mt19937_64& rng) {
    std::ostringstream os;
    std::uniform_int_distribution<int> pick(0, nts - 1);
    os << "%start S0\n";
    for (int i = 0; i < nts; ++i) {
        os << "S" << i << " -> S" << pick(rng) << " S" << pick(rng) << " # 1/4\n";
        os << "S" << i << " -> S" << pick(rng) << " S" << pick(rng) << " # 1/4\n";
        os << "S" << i << " -> 'a' # 1/4\n";
        os << "S" << i << " -> 'b' # 1/5\n";
        if (i % 3 == 0) os << "S" << i << " -> # 1/20\n";
    }
    return scfg::grammar_from_text(os.str());
}

std::vector<int> make_word(const scfg::Grammar& g, int len, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> pick(0, 1);
    std::vector<int> w;
    for (int i = 0; i < len; ++i) w.push_back(*g.find_terminal(pick(rng) ? "a" : "b"));
    return w;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"serial vs OpenMP chart-parsing benchmark"};
    int nts = 8, len = 96, reps = 3;
    unsigned long seed = 20240817;
    app.add_option("--nts", nts, "nonterminals in the generated grammar");
    app.add_option("--len", len, "word length");
    app.add_option("--reps", reps, "repetitions per configuration");
    app.add_option("--seed", seed, "generator seed");
    CLI11_PARSE(app, argc, argv);

    std::mt19937_64 rng(seed);
    scfg::Grammar g = make_grammar(nts, rng);
    scfg::SnfGrammar snf = scfg::to_snf(g);
    std::vector<int> word = make_word(g, len, rng);

    std::cout << "grammar: " << nts << " nonterminals (" << snf.g.nt_count()
              << " after SNF), word length " << len << ", " << reps << " reps\n";

    auto run_exact = [&](scfg::Exec exec) {
        scfg::PipelineOptions opt;
        opt.exec = exec;
        return scfg::max_parse(snf, word, opt);
    };
    auto run_approx = [&](scfg::Exec exec) {
        scfg::PipelineOptions opt;
        opt.exec = exec;
        return scfg::approx_max_parse(g, word, poe::Rat(1, 100), opt);
    };

    // Correctness first: the two execution modes must agree bit for bit.
    auto serial = run_exact(scfg::Exec::Serial);
    auto parallel = run_exact(scfg::Exec::Parallel);
    if (serial.prob.zero != parallel.prob.zero ||
        (!serial.prob.zero && !poe::equals(serial.prob.value, parallel.prob.value))) {
        std::cerr << "FAIL: serial and parallel probabilities differ\n";
        return 1;
    }
    if (serial.dag && parallel.dag &&
        scfg::dag_to_text(*serial.dag, snf.g) != scfg::dag_to_text(*parallel.dag, snf.g)) {
        std::cerr << "FAIL: serial and parallel DAGs differ\n";
        return 1;
    }
    auto aps = run_approx(scfg::Exec::Serial);
    auto app_ = run_approx(scfg::Exec::Parallel);
    if (aps.member != app_.member || aps.log2_prob != app_.log2_prob) {
        std::cerr << "FAIL: serial and parallel approximations differ\n";
        return 1;
    }
    std::cout << "serial/parallel outputs identical\n\n";

    struct Row {
        const char* name;
        double serial_ms;
        double parallel_ms;
    };
    Row rows[2] = {{"exact", 0, 0}, {"approx(0.01)", 0, 0}};
    for (int r = 0; r < reps; ++r) {
        auto t0 = Clock::now();
        run_exact(scfg::Exec::Serial);
        rows[0].serial_ms += ms_since(t0);
        t0 = Clock::now();
        run_exact(scfg::Exec::Parallel);
        rows[0].parallel_ms += ms_since(t0);
        t0 = Clock::now();
        run_approx(scfg::Exec::Serial);
        rows[1].serial_ms += ms_since(t0);
        t0 = Clock::now();
        run_approx(scfg::Exec::Parallel);
        rows[1].parallel_ms += ms_since(t0);
    }
    std::cout << "kernel          serial-ms   parallel-ms   speedup\n";
    for (const Row& row : rows) {
        double s = row.serial_ms / reps, p = row.parallel_ms / reps;
        std::printf("%-14s %10.2f %12.2f %9.2fx\n", row.name, s, p, p > 0 ? s / p : 0.0);
    }
    return 0;
}
