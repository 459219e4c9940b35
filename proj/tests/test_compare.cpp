#include "doctest.h"

#include <random>

#include "oracles.hpp"
#include "poeparse/compare.hpp"

using poe::CompareMode;
using poe::Int;
using poe::Ordering;
using poe::PoE;
using poe::Rat;

namespace {

PoE mk(std::vector<long> bases, std::vector<long> exps) {
    PoE x;
    for (long b : bases) x.bases.emplace_back(b);
    for (long e : exps) x.exponents.emplace_back(e);
    return poe::normalize(x);
}

Ordering exact_order(const PoE& x, const PoE& y, long budget = 1 << 22) {
    Rat a = poe::eval_exact(x, budget), b = poe::eval_exact(y, budget);
    if (a == b) return Ordering::Equal;
    return a < b ? Ordering::Less : Ordering::Greater;
}

}  // namespace

TEST_CASE("comparison basics") {
    auto out = poe::compare(mk({2}, {10}), mk({3}, {6}));
    CHECK(out.ordering == Ordering::Greater);  // 1024 > 729
    CHECK(exact_order(mk({2}, {10}), mk({3}, {6})) == Ordering::Greater);

    auto eq = poe::compare(mk({2, 3}, {6, 3}), mk({12}, {3}));
    CHECK(eq.ordering == Ordering::Equal);
    CHECK(eq.certificate.precision_bits == 0);  // no log phase on equality

    auto self = poe::compare(mk({7}, {3}), mk({7}, {3}));
    CHECK(self.ordering == Ordering::Equal);
}

TEST_CASE("adaptive mode on adversarial convergent pairs") {
    auto conv = oracles::convergents_log3_log5(14);
    CompareMode mode = CompareMode::adaptive(1 << 20);
    for (auto& [p, q] : conv) {
        if (q < 100 || q > 2000000) continue;
        // 3^q vs 5^p; with q this small, the exact comparison is feasible
        PoE x = poe::poe_factor(3, q);
        PoE y = poe::poe_factor(5, p);
        auto out = poe::compare(x, y, mode);
        CHECK(out.ordering == exact_order(x, y, 6 << 20));
        CHECK(out.certificate.precision_bits >= 64);
    }
}

TEST_CASE("adaptive mode reports Unresolved at its cap") {
    // take a convergent deep enough that |Lambda| < 2^-70
    auto conv = oracles::convergents_log3_log5(55);
    for (auto& [p, q] : conv) {
        poe::LinearForm f = poe::make_linear_form({3, 5}, {q, Int(-p)});
        Rat v = poe::linear_form_approx(f, 256).value;
        Rat av = v < 0 ? Rat(-v) : v;
        if (av == 0 || poe::cmp_pow2(av, -70) > 0) continue;
        auto out = poe::compare(poe::poe_factor(3, q), poe::poe_factor(5, p),
                                CompareMode::adaptive(64));
        CHECK(out.ordering == Ordering::Unresolved);
        return;
    }
    FAIL("no sufficiently deep convergent found");
}

TEST_CASE("circuit comparison") {
    poe::Circuit a;
    int in = a.add_input(2);
    a.output = a.add_mul(in, in);
    poe::Circuit b;
    b.output = b.add_input(5);
    CHECK(poe::compare_circuit(a, b).ordering == Ordering::Less);  // 4 < 5
    CHECK(poe::compare_circuit(a, a).ordering == Ordering::Equal);

    // 2^(2^10) vs 3^648: 648 log2(3) = 1027.07... > 1024
    poe::Circuit chain;
    int g = chain.add_input(2);
    for (int i = 0; i < 10; ++i) g = chain.add_mul(g, g);
    chain.output = g;
    poe::Circuit p648 = poe::to_circuit(poe::poe_factor(3, 648));
    CHECK(poe::compare_circuit(chain, p648).ordering == Ordering::Less);
    // confirm the ordering claim with the base-2 log reference
    Rat bits = Rat(648) * poe::log2_int_approx(3, 64);
    CHECK(bits > 1024);
}

TEST_CASE("all modes agree with exact comparison on evaluable pairs") {
    std::mt19937_64 rng(321);
    std::vector<CompareMode> modes = {
        CompareMode::adaptive(),
        CompareMode::unconditional(poe::pow2(96)),
        CompareMode::lang_waldschmidt(1, 1),
        CompareMode::baker_abc(1),
    };
    for (int t = 0; t < 60; ++t) {
        PoE x, y;
        if (t % 3 == 0) {
            std::tie(x, y) = oracles::random_equal_pair(rng, 1 << 10);
        } else {
            x = oracles::random_poe(rng, 2, 1 << 12, 40);
            y = oracles::random_poe(rng, 2, 1 << 12, 40);
        }
        Ordering want = exact_order(x, y);
        std::vector<Ordering> got;
        for (const auto& m : modes) got.push_back(poe::compare(x, y, m).ordering);
        for (Ordering o : got) CHECK(o == want);  // also covers mode consistency
    }
}

TEST_CASE("antisymmetry") {
    std::mt19937_64 rng(55);
    for (int t = 0; t < 40; ++t) {
        PoE x = oracles::random_poe(rng, 3, 1000, 30);
        PoE y = oracles::random_poe(rng, 3, 1000, 30);
        auto xy = poe::compare(x, y).ordering;
        auto yx = poe::compare(y, x).ordering;
        if (xy == Ordering::Greater) CHECK(yx == Ordering::Less);
        if (xy == Ordering::Less) CHECK(yx == Ordering::Greater);
        if (xy == Ordering::Equal) CHECK(yx == Ordering::Equal);
        CHECK(poe::compare(x, x).ordering == Ordering::Equal);
    }
}

TEST_CASE("a certified sign stays certified at higher precision") {
    std::mt19937_64 rng(77);
    for (int t = 0; t < 25; ++t) {
        PoE x = oracles::random_poe(rng, 3, 500, 25);
        PoE y = oracles::random_poe(rng, 3, 500, 25);
        auto out = poe::compare(x, y);
        if (out.ordering == Ordering::Equal) continue;
        long j = out.certificate.precision_bits;
        auto f = poe::quotient_form(x, y);
        REQUIRE(f.has_value());
        for (long jj : {2 * j, 4 * j}) {
            Rat v = poe::linear_form_approx(*f, jj).value;
            CHECK((v > poe::pow2_rat(-jj + 1)) ==
                  (out.ordering == Ordering::Greater));
            CHECK((v < -poe::pow2_rat(-jj + 1)) == (out.ordering == Ordering::Less));
        }
    }
}

TEST_CASE("unconditional mode refuses oversized gaps at the default cap") {
    PoE x = mk({65521, 65519, 65497}, {100, 100, 100});
    PoE y = mk({65479, 65449, 65447}, {100, 100, 100});
    CHECK_THROWS_AS(poe::compare(x, y, CompareMode::unconditional()), poe::OverflowGuard);
    // the same comparison resolves fine with a raised cap or adaptively
    auto out = poe::compare(x, y, CompareMode::unconditional(poe::pow2(128)));
    CHECK(out.ordering == poe::compare(x, y).ordering);
    CHECK(out.certificate.gap_bits > 0);
}

TEST_CASE("mode parameter validation") {
    CHECK_THROWS_AS(CompareMode::adaptive(32), std::invalid_argument);
    CHECK_THROWS_AS(CompareMode::lang_waldschmidt(0, 1), std::invalid_argument);
    CHECK_THROWS_AS(CompareMode::baker_abc(Rat(-2)), std::invalid_argument);
}
