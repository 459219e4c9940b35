#include "doctest.h"

#include <random>

#include "oracles.hpp"
#include "poeparse/circuit.hpp"

using poe::Circuit;
using poe::Int;
using poe::PoE;
using poe::Rat;

TEST_CASE("from_circuit basic gates") {
    Circuit c;
    c.output = c.add_input(7);
    PoE x = poe::from_circuit(c);
    CHECK(x.bases == std::vector<Int>{7});
    CHECK(x.exponents == std::vector<Int>{1});

    Circuit sq;
    int in = sq.add_input(3);
    sq.output = sq.add_mul(in, in);
    PoE y = poe::from_circuit(sq);
    CHECK(y.bases == std::vector<Int>{3});
    CHECK(y.exponents == std::vector<Int>{2});

    Circuit dv;
    int a = dv.add_input(2);
    int b = dv.add_mul(a, a);
    dv.output = dv.add_div(b, a);
    CHECK(poe::eval_exact(poe::from_circuit(dv), 64) == Rat(2));
}

TEST_CASE("squaring chain reaches exponent 2^d") {
    // gate at depth d yields exponent 2^d; cross-check by exact squaring
    for (int d : {1, 4, 10, 20}) {
        Circuit c;
        int g = c.add_input(2);
        for (int i = 0; i < d; ++i) g = c.add_mul(g, g);
        c.output = g;
        PoE x = poe::from_circuit(c);
        CHECK(x.bases == std::vector<Int>{2});
        CHECK(x.exponents == std::vector<Int>{Int(1) << d});
        if (d <= 10) {
            Rat v(2);
            for (int i = 0; i < d; ++i) v = v * v;
            CHECK(poe::eval_exact(x, 1 << 12) == v);
        }
    }
}

TEST_CASE("to_circuit uses repeated squaring") {
    Circuit one = poe::to_circuit(poe::PoE{});
    CHECK(poe::eval_circuit(one, 64) == Rat(1));

    Circuit single = poe::to_circuit(poe::poe_factor(2, 1));
    CHECK(single.gates.size() == 1);  // exponent 1 is just the input
    CHECK(poe::eval_circuit(single, 64) == Rat(2));

    Circuit p5 = poe::to_circuit(poe::poe_factor(3, 5));
    long non_input = 0;
    for (const auto& g : p5.gates)
        if (g.op != Circuit::Op::Input) ++non_input;
    CHECK(non_input <= 2 * 3);  // 2 * ceil(log2 5)
    CHECK(poe::eval_circuit(p5, 64) == Rat(243));

    PoE frac = poe::make_poe({Int(2), Int(5)}, {Int(3), Int(-2)});
    Circuit fc = poe::to_circuit(frac);
    CHECK(fc.gates[fc.output].op == Circuit::Op::Div);
    CHECK(poe::eval_circuit(fc, 64) == Rat(8, 25));

    // negative-only exponents still produce a valid quotient
    Circuit neg = poe::to_circuit(poe::poe_factor(3, -4));
    CHECK(poe::eval_circuit(neg, 64) == Rat(1, 81));
}

TEST_CASE("circuit validation rejects malformed programs") {
    Circuit c;
    c.add_input(2);
    c.output = 5;
    CHECK_THROWS_AS(poe::validate(c), std::invalid_argument);

    Circuit fwd;
    fwd.gates.push_back({Circuit::Op::Mul, 0, 0, 1});  // forward reference
    fwd.gates.push_back({Circuit::Op::Input, Int(2), -1, -1});
    fwd.output = 0;
    CHECK_THROWS_AS(poe::validate(fwd), std::invalid_argument);

    Circuit zero;
    zero.output = zero.add_input(0);
    CHECK_THROWS_AS(poe::validate(zero), std::invalid_argument);
}

TEST_CASE("circuit text format round-trips") {
    std::string text =
        "g0 = input 7\n"
        "g1 = mul g0 g0\n"
        "g2 = div g1 g0\n"
        "output g2\n";
    Circuit c = poe::circuit_from_text(text);
    CHECK(poe::circuit_to_text(c) == text);
    CHECK(poe::eval_circuit(c, 64) == Rat(7));

    CHECK_THROWS_AS(poe::circuit_from_text("g0 = input 7\n"), poe::ParseError);       // no output
    CHECK_THROWS_AS(poe::circuit_from_text("g1 = input 7\noutput g1\n"), poe::ParseError);
    CHECK_THROWS_AS(poe::circuit_from_text("g0 = mul g0 g0\noutput g0\n"), poe::ParseError);
    CHECK_THROWS_AS(poe::circuit_from_text("g0 = input 7\noutput g0\ntrailing\n"),
                    poe::ParseError);
    CHECK_THROWS_AS(poe::circuit_from_text("g0 = input 7 extra\noutput g0\n"), poe::ParseError);

    std::mt19937_64 rng(3);
    for (int t = 0; t < 30; ++t) {
        PoE x = oracles::random_poe(rng, 3, 500, 30);
        Circuit cc = poe::to_circuit(x);
        Circuit back = poe::circuit_from_text(poe::circuit_to_text(cc));
        CHECK(poe::equals(poe::from_circuit(back), x));
    }
}

TEST_CASE("eval_circuit enforces its bit budget") {
    Circuit c;
    int g = c.add_input(2);
    for (int i = 0; i < 12; ++i) g = c.add_mul(g, g);  // 2^4096
    c.output = g;
    CHECK_THROWS_AS(poe::eval_circuit(c, 1024), poe::BudgetExceeded);
    CHECK(poe::eval_circuit(c, 8192).get_num() == poe::pow2(4096));
}
