#pragma once

#include <vector>

#include "poeparse/numeric.hpp"

namespace poe {

// A rational approximation with a proven absolute error bound:
// |true_value - value| < 2^-error_exponent.
struct ApproxReal {
    Rat value;
    long error_exponent = 0;
};

/*
 * A homogeneous linear form in natural logarithms of integers:
 *
 *     Lambda = sum_i b[i] * ln(a[i]),   a[i] >= 2, b[i] != 0.
 *
 * Its sign decides PoE inequalities; explicit lower bounds on |Lambda|
 * (when nonzero) bound the precision a sign test needs.
 */
struct LinearForm {
    std::vector<Int> a;
    std::vector<Int> b;
};

LinearForm make_linear_form(std::vector<Int> a, std::vector<Int> b);

enum class GapRegime { BakerWustholz, Matveev, LangWaldschmidt, BakerAbc };

// Certified separation: whenever Lambda != 0, |Lambda| >= 2^-log2_gap.
// All gap computations round outward, so the bound is never overstated.
struct GapBound {
    Int log2_gap;
    GapRegime regime;
    Rat param_eps;            // LangWaldschmidt
    Rat param_c;              // LangWaldschmidt
    Rat param_k2;             // BakerAbc
    bool clamped_log_factor = false;  // BakerAbc with max|b_i| <= 2 (vacuous log factor)
};

// Natural log of a >= 1 with |ln(a) - v| < 2^-j, exact dyadic arithmetic
// only: range-reduce by the leading bit, sum the ln(1+y) series at
// y = a/2^(m+1) - 1 in [-1/2, 0), add (m+1) times a truncation of
// ln 2 = sum 1/(i 2^i), with the error split between the two parts.
ApproxReal log_int(const Int& a, long j);

// v = sum b_i * log_int(a_i, j + ceil_log2|b_i| + ceil_log2 n), giving
// |Lambda - v| < 2^-j.
ApproxReal linear_form_approx(const LinearForm& f, long j);

// Default refusal threshold for the unconditional gap formulas.
Int default_gap_cap();

// Unconditional bounds. C(n) = 18 (n+1)! n^(n+1) 32^(n+2) ln(2n) and
// C'(n) = 2.9 (2e)^(2n+6) (n+2)^(9/2); gap = ceil(C * prod h'(a_i) * ln B / ln 2)
// with h'(a) = max(ln a, 1) and B = max(max|b_i|, e), all factors rounded
// outward. Throws OverflowGuard when the gap exceeds `cap`.
GapBound bw_gap(const LinearForm& f, const Int& cap = default_gap_cap());
GapBound matveev_gap(const LinearForm& f, const Int& cap = default_gap_cap());

// Conjectural bound C(eps)^n * B / (|b_1|...|b_n| * a_1...a_n)^(1+eps);
// eps and the constant are caller-supplied (the conjecture fixes neither).
GapBound lw_gap(const LinearForm& f, const Rat& eps, const Rat& c);

// Conjectural bound e^(-K2 * (sum_i ln a_i) * ln(max_i |b_i|)); the log
// factor is clamped to >= 1 (and flagged) where it would be vacuous.
GapBound baker_abc_gap(const LinearForm& f, const Rat& k2);

// Certified directional bounds on ln(a), used by the gap formulas and tests.
Rat ln_upper(const Int& a);
Rat ln_lower(const Int& a);

// Base-2 logarithm of a >= 1 within 2^-k, snapped to a dyadic rational.
Rat log2_int_approx(const Int& a, long k);

}  // namespace poe
