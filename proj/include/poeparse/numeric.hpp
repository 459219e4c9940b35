#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace poe {

// All exact arithmetic in this library runs on GMP big integers and
// canonical big rationals (lowest terms, positive denominator).
using Int = mpz_class;
using Rat = mpq_class;

// Thrown when expanding a succinct value would exceed the caller's bit budget.
struct BudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when an unconditional gap bound exceeds the configured magnitude cap.
struct OverflowGuard : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Text-input failure with position information (1-based line/column).
struct ParseError : std::runtime_error {
    int line;
    int column;
    ParseError(const std::string& msg, int line_, int col_)
        : std::runtime_error(msg + " (line " + std::to_string(line_) + ", column " +
                             std::to_string(col_) + ")"),
          line(line_),
          column(col_) {}
};

// Number of bits in |x|; bit_length(0) == 0. For x > 0, 2^(b-1) <= x < 2^b.
inline long bit_length(const Int& x) {
    if (x == 0) return 0;
    return static_cast<long>(mpz_sizeinbase(x.get_mpz_t(), 2));
}

// Smallest k >= 0 with 2^k >= x. Requires x >= 1.
inline long ceil_log2(const Int& x) {
    if (x <= 0) throw std::invalid_argument("ceil_log2: argument must be positive");
    if (x == 1) return 0;
    Int m = x - 1;
    return bit_length(m);
}

inline Int pow2(long e) {
    Int r;
    mpz_ui_pow_ui(r.get_mpz_t(), 2, static_cast<unsigned long>(e));
    return r;
}

inline Int pow_int(const Int& base, unsigned long e) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

inline Rat make_rat(const Int& num, const Int& den) {
    Rat r(num, den);
    r.canonicalize();
    return r;
}

// 2^e as a rational, for any sign of e (e must fit in a long).
inline Rat pow2_rat(long e) {
    if (e >= 0) return Rat(pow2(e));
    return make_rat(1, pow2(-e));
}

// floor(x * 2^frac_bits) / 2^frac_bits  (round toward -inf).
Rat dyadic_floor(const Rat& x, long frac_bits);

// Exact three-way comparison of x (> 0) against 2^e, where e may be a huge
// integer that must never be materialized as a power of two.
int cmp_pow2(const Rat& x, const Int& e);

// Parses "p/q", a decimal like "0.375" (converted exactly), or an integer.
Rat rat_from_string(const std::string& s);

// Exact decimal expansion of a rational whose denominator is 2^a * 5^b.
std::string rat_to_exact_decimal(const Rat& x);

}  // namespace poe
