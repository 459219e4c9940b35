#include "poeparse/logform.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <shared_mutex>

namespace poe {

namespace {

// Rational bounds on e, correct in both directions:
// e = 2.71828182845904523536...
const Rat& e_upper() {
    static const Rat v = make_rat(Int("27182818284590452354"), Int("10000000000000000000"));
    return v;
}
const Rat& e_lower() {
    static const Rat v = make_rat(Int("27182818284590452353"), Int("10000000000000000000"));
    return v;
}

// Truncation of ln 2 = sum_{i>=1} 1/(i 2^i): K terms at F fraction bits,
// every term floor-rounded. Result error in (0, 2^-K + K*2^-F).
Int ln2_fixed(long terms, long frac_bits) {
    Int sum = 0;
    for (long i = 1; i <= terms; ++i) {
        if (i > frac_bits) break;  // further terms floor to zero
        sum += pow2(frac_bits - i) / i;
    }
    return sum;
}

struct LogCache {
    std::shared_mutex mu;
    std::map<std::pair<Int, long>, Rat> entries;
};

LogCache& log_cache() {
    static LogCache c;
    return c;
}

}  // namespace

ApproxReal log_int(const Int& a, long j_bits) {
    if (a <= 0) throw std::invalid_argument("log_int: argument must be positive");
    if (j_bits < 1) throw std::invalid_argument("log_int: precision must be >= 1");
    if (a == 1) return {Rat(0), j_bits};

    {
        std::shared_lock lock(log_cache().mu);
        auto it = log_cache().entries.find({a, j_bits});
        if (it != log_cache().entries.end()) return {it->second, j_bits};
    }

    // Two guard bits beyond the contract; the final bound is 2^-(j+2)*4 = 2^-j_bits
    // with the actual error at most a quarter of it.
    long j = j_bits + 2;
    long m = bit_length(a) - 1;  // 2^m <= a < 2^(m+1)

    // Reduced series: ln(a/2^(m+1)) = -sum_{i>=1} u^i/i with
    // u = (2^(m+1) - a)/2^(m+1) in (0, 1/2]. Tail after K1 terms < 2^-K1;
    // fixed-point floor rounding adds < 3*K1 units of 2^-F.
    long k1 = j + 2;
    long f = j + 2 + bit_length(Int(3 * k1));
    Int u0 = pow2(m + 1) - a;
    Int p = (u0 << f) >> (m + 1);
    Int series1 = 0;
    for (long i = 1; i <= k1; ++i) {
        if (i > 1) p = (p * u0) >> (m + 1);
        if (p == 0) break;
        series1 += p / i;
    }

    // ln 2 part: need error < 2^-(j+2)/(m+1) before scaling by (m+1).
    long k2 = j + 2 + bit_length(Int(m + 1));
    long f2 = k2 + bit_length(Int(k2)) + 1;
    Int series2 = ln2_fixed(k2, f2);

    Rat v = make_rat(-series1, pow2(f)) + Rat(m + 1) * make_rat(series2, pow2(f2));

    {
        std::unique_lock lock(log_cache().mu);
        log_cache().entries.emplace(std::make_pair(a, j_bits), v);
    }
    return {v, j_bits};
}

LinearForm make_linear_form(std::vector<Int> a, std::vector<Int> b) {
    if (a.size() != b.size()) throw std::invalid_argument("linear form: list lengths differ");
    if (a.empty()) throw std::invalid_argument("linear form: empty");
    for (const Int& ai : a)
        if (ai < 2) throw std::invalid_argument("linear form: bases must be >= 2");
    for (const Int& bi : b)
        if (bi == 0) throw std::invalid_argument("linear form: zero coefficient");
    return {std::move(a), std::move(b)};
}

ApproxReal linear_form_approx(const LinearForm& f, long j) {
    if (j < 1) throw std::invalid_argument("linear_form_approx: precision must be >= 1");
    long n = static_cast<long>(f.a.size());
    long log_n = ceil_log2(Int(n));
    Rat v = 0;
    for (size_t i = 0; i < f.a.size(); ++i) {
        long jt = j + ceil_log2(abs(f.b[i])) + log_n;
        v += Rat(f.b[i]) * log_int(f.a[i], jt).value;
    }
    return {v, j};
}

namespace {

constexpr long kGapLnBits = 80;

Rat ln_dir(const Int& a, bool upper) {
    if (a == 1) return Rat(0);
    Rat v = log_int(a, kGapLnBits).value;
    Rat slack = pow2_rat(-kGapLnBits);
    return upper ? Rat(v + slack) : Rat(v - slack);
}

// h'(a) = max(ln a, 1), rounded up.
Rat h_prime_upper(const Int& a) { return std::max(ln_dir(a, true), Rat(1)); }

Int max_abs_coeff(const LinearForm& f) {
    Int m = 0;
    for (const Int& b : f.b) m = std::max(m, Int(abs(b)));
    return m;
}

// ln(B) with B = max(max|b_i|, e), rounded up; |b| <= 2 means B = e (ln e = 1).
Rat ln_b_upper(const LinearForm& f) {
    Int maxb = max_abs_coeff(f);
    if (maxb <= 2) return Rat(1);
    return ln_dir(maxb, true);
}

Int ceil_rat(const Rat& x) {
    Int q;
    mpz_cdiv_q(q.get_mpz_t(), x.get_num().get_mpz_t(), x.get_den().get_mpz_t());
    return q;
}

// Smallest integer g with 2^g >= r (r > 0).
Int ceil_log2_rat(const Rat& r) {
    long g = bit_length(r.get_num()) - bit_length(r.get_den());
    auto holds = [&](long e) {
        if (e >= 0) return r.get_den() * pow2(e) >= r.get_num();
        return r.get_den() >= r.get_num() * pow2(-e);
    };
    while (!holds(g)) ++g;
    while (g > std::numeric_limits<long>::min() && holds(g - 1)) --g;
    return Int(g);
}

GapBound finish_unconditional(const LinearForm& f, Rat constant_upper, GapRegime regime,
                              const Int& cap) {
    Rat u = constant_upper * ln_b_upper(f);
    for (const Int& a : f.a) u *= h_prime_upper(a);
    u /= ln_dir(2, false);
    Int g = ceil_rat(u);
    if (g < 0) g = 0;
    if (g > cap)
        throw OverflowGuard("gap bound of " + g.get_str() + " bits exceeds cap " + cap.get_str());
    GapBound out;
    out.log2_gap = g;
    out.regime = regime;
    return out;
}

}  // namespace

Int default_gap_cap() { return pow2(31); }

GapBound bw_gap(const LinearForm& f, const Int& cap) {
    unsigned long n = f.a.size();
    if (n > (1ul << 20)) throw std::invalid_argument("bw_gap: form too long");
    Int fact;
    mpz_fac_ui(fact.get_mpz_t(), n + 1);
    Int c_int = 18 * fact * pow_int(Int(n), n + 1) * pow_int(Int(32), n + 2);
    // C(n) carries a factor ln(2n), rounded up.
    Rat c_up = Rat(c_int) * ln_dir(Int(2 * n), true);
    return finish_unconditional(f, c_up, GapRegime::BakerWustholz, cap);
}

GapBound matveev_gap(const LinearForm& f, const Int& cap) {
    unsigned long n = f.a.size();
    if (n > (1ul << 20)) throw std::invalid_argument("matveev_gap: form too long");
    // C'(n) = 2.9 (2e)^(2n+6) (n+2)^(9/2), rounded up:
    Rat two_e_up = 2 * e_upper();
    Rat pw(pow_int(two_e_up.get_num(), 2 * n + 6), pow_int(two_e_up.get_den(), 2 * n + 6));
    pw.canonicalize();
    Int np2 = Int(n + 2);
    // sqrt(n+2) upper bound at 32 fractional bits
    Int s;
    mpz_sqrt(s.get_mpz_t(), Int(np2 << 64).get_mpz_t());
    Rat sqrt_up = make_rat(s + 1, pow2(32));
    Rat c_up = make_rat(29, 10) * pw * Rat(pow_int(np2, 4)) * sqrt_up;
    return finish_unconditional(f, c_up, GapRegime::Matveev, cap);
}

GapBound lw_gap(const LinearForm& f, const Rat& eps, const Rat& c) {
    if (eps <= 0) throw std::invalid_argument("lw_gap: eps must be positive");
    if (c <= 0) throw std::invalid_argument("lw_gap: C must be positive");
    unsigned long n = f.a.size();

    Int maxb = max_abs_coeff(f);
    Rat b_low = maxb <= 2 ? e_lower() : Rat(maxb);

    Int x = 1;
    for (const Int& b : f.b) x *= abs(b);
    for (const Int& a : f.a) x *= a;

    // (x)^(1+eps) rounded up: x^((q+p)/q) with eps = p/q.
    Int p = eps.get_num(), q = eps.get_den();
    Int powed = pow_int(x, Int(p + q).get_ui());
    Int root;
    int exact = mpz_root(root.get_mpz_t(), powed.get_mpz_t(), q.get_ui());
    Int denom_up = exact ? root : root + 1;

    Rat c_pow(pow_int(c.get_num(), n), pow_int(c.get_den(), n));
    c_pow.canonicalize();
    Rat rhs_low = c_pow * b_low / Rat(denom_up);

    GapBound out;
    out.log2_gap = ceil_log2_rat(Rat(1) / rhs_low);
    if (out.log2_gap < 0) out.log2_gap = 0;
    out.regime = GapRegime::LangWaldschmidt;
    out.param_eps = eps;
    out.param_c = c;
    return out;
}

GapBound baker_abc_gap(const LinearForm& f, const Rat& k2) {
    if (k2 <= 0) throw std::invalid_argument("baker_abc_gap: K'' must be positive");
    Rat sum_up = 0;
    for (const Int& a : f.a) sum_up += ln_dir(a, true);
    Int maxb = max_abs_coeff(f);
    GapBound out;
    Rat factor_up;
    if (maxb == 1) {
        // ln(max|b|) = 0 makes the bound vacuous; clamp and flag.
        factor_up = 1;
        out.clamped_log_factor = true;
    } else {
        factor_up = ln_dir(maxb, true);
        if (factor_up < 1) {
            factor_up = 1;
            out.clamped_log_factor = true;
        }
    }
    Rat u = k2 * sum_up * factor_up / ln_dir(2, false);
    out.log2_gap = ceil_rat(u);
    if (out.log2_gap < 0) out.log2_gap = 0;
    out.regime = GapRegime::BakerAbc;
    out.param_k2 = k2;
    return out;
}

Rat ln_upper(const Int& a) { return ln_dir(a, true); }
Rat ln_lower(const Int& a) { return ln_dir(a, false); }

Rat log2_int_approx(const Int& a, long k) {
    if (a <= 0) throw std::invalid_argument("log2_int_approx: argument must be positive");
    if (k < 1) throw std::invalid_argument("log2_int_approx: precision must be >= 1");
    if (a == 1) return Rat(0);
    long t = k + bit_length(Int(bit_length(a))) + 4;
    Rat la = log_int(a, t).value;
    Rat l2 = log_int(2, t).value;
    return dyadic_floor(la / l2, k + 2);
}

}  // namespace poe
