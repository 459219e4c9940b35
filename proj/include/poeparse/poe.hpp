#pragma once

#include <functional>
#include <string>
#include <vector>

#include "poeparse/numeric.hpp"

namespace poe {

/*
 * A positive rational written as a product of exponentials:
 *
 *     value = prod_i bases[i] ^ exponents[i]
 *
 * In normalized form the bases are pairwise distinct, >= 2, sorted
 * ascending, and every exponent is nonzero. Empty lists denote 1.
 * Values are always nonzero positive rationals; there is no zero.
 */
struct PoE {
    std::vector<Int> bases;
    std::vector<Int> exponents;

    bool is_one() const { return bases.empty(); }
    size_t size() const { return bases.size(); }
};

PoE make_poe(std::vector<Int> bases, std::vector<Int> exponents);

// Single-factor convenience: base^exp, normalized.
PoE poe_factor(const Int& base, const Int& exp);

// Exact rational p/q as a PoE (p^1 * q^-1, normalized). Requires p/q > 0.
PoE poe_from_rat(const Rat& r);

// Drops base-1 entries and zero exponents, merges duplicate bases by summing
// exponents, sorts bases ascending. Rejects any base <= 0.
PoE normalize(const PoE& x);

PoE mul(const PoE& x, const PoE& y);
PoE div(const PoE& x, const PoE& y);
PoE pow(const PoE& x, const Int& k);

// Exact rational value, when its binary encoding fits within bit_budget bits;
// throws BudgetExceeded otherwise (the representable values can need 2^(2^k)
// bits, so the guard is the normal exit for large inputs).
Rat eval_exact(const PoE& x, long bit_budget);

// Estimated encoding size in bits of the expanded value (an upper bound,
// sum |e_i| * bitlen(b_i)); used by the eval_exact guard.
Int expanded_size_bound(const PoE& x);

/*
 * The four-list positive-integer form of the comparison x ? y: all signed
 * exponents are folded so that value(x)/value(y) = a^b / c^d with every
 * entry positive. Lists a and c never contain 1.
 */
struct FourLists {
    std::vector<Int> a, b, c, d;
};

FourLists rearrange(const PoE& x, const PoE& y);

struct EqualityTrace {
    bool equal = false;
    long iterations = 0;
};

// Observer receives the four current lists after every refinement iteration.
using Fig1Observer = std::function<void(const std::vector<Int>&, const std::vector<Int>&,
                                        const std::vector<Int>&, const std::vector<Int>&)>;

/*
 * Equality of PoE values by iterated gcd refinement, never by evaluation:
 * repeatedly find (i, j) with g = gcd(a_i, c_j) > 1, divide both entries by
 * g, drop entries that become 1, and append (g, |b_i - d_j|) to the side
 * with the larger exponent (nothing when equal). Appended entries take part
 * in later scans. Both sides empty at termination iff the values are equal.
 * Pair selection scans (i, j) in lexicographic order over the current lists
 * and restarts after each modification.
 */
EqualityTrace equals_trace(const PoE& x, const PoE& y, const Fig1Observer& observer = {});

bool equals(const PoE& x, const PoE& y);

// Text form `2^6 * 3^3 / 5^2`: whitespace-insensitive, `/` flips the sign of
// the following factor's exponent, `^exp` optional (default 1), empty input
// (or "1") denotes 1. Rejects trailing garbage.
PoE poe_from_text(const std::string& text);
std::string poe_to_text(const PoE& x);

// Canonical single-token serialization of a normalized PoE; stable across
// runs, used as a cache/interning key.
std::string poe_key(const PoE& x);

}  // namespace poe
