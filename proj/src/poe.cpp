#include "poeparse/poe.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace poe {

Rat dyadic_floor(const Rat& x, long frac_bits) {
    Int scaled = (x.get_num() * pow2(frac_bits)) / x.get_den();
    // mpz division truncates toward zero; fix up for negatives.
    if (x < 0 && scaled * x.get_den() != x.get_num() * pow2(frac_bits)) scaled -= 1;
    return make_rat(scaled, pow2(frac_bits));
}

int cmp_pow2(const Rat& x, const Int& e) {
    if (x <= 0) throw std::invalid_argument("cmp_pow2: x must be positive");
    // floor(log2(x)) is within {f0-1, f0} for f0 = bitlen(num) - bitlen(den).
    long f0 = bit_length(x.get_num()) - bit_length(x.get_den());
    long flog;  // floor(log2 x): 2^flog <= x < 2^flog+1
    // x >= 2^f  <=>  num >= den * 2^f
    auto at_least = [&](long f) {
        if (f >= 0) return x.get_num() >= x.get_den() * pow2(f);
        return x.get_num() * pow2(-f) >= x.get_den();
    };
    flog = at_least(f0) ? f0 : f0 - 1;
    if (Int(flog) > e) return 1;
    if (Int(flog) < e) {
        // x < 2^(flog+1) <= 2^e
        return -1;
    }
    // flog == e (so e fits in a long): x in [2^e, 2^(e+1))
    if (f0 == flog && !at_least(f0)) return -1;  // unreachable, kept for clarity
    long el = static_cast<long>(mpz_get_si(Int(e).get_mpz_t()));
    Rat p = pow2_rat(el);
    return mpq_cmp(x.get_mpq_t(), p.get_mpq_t());
}

Rat rat_from_string(const std::string& s) {
    std::string t;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) t += c;
    if (t.empty()) throw std::invalid_argument("empty rational literal");
    auto slash = t.find('/');
    auto dot = t.find('.');
    if (slash != std::string::npos) {
        if (dot != std::string::npos) throw std::invalid_argument("bad rational literal: " + s);
        Int num(t.substr(0, slash));
        Int den(t.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator: " + s);
        return make_rat(num, den);
    }
    if (dot != std::string::npos) {
        std::string digits = t.substr(0, dot) + t.substr(dot + 1);
        size_t frac = t.size() - dot - 1;
        if (digits.empty() || digits == "-" || digits == "+")
            throw std::invalid_argument("bad decimal literal: " + s);
        Int num(digits);
        Int den = 1;
        for (size_t i = 0; i < frac; ++i) den *= 10;
        return make_rat(num, den);
    }
    return Rat(Int(t));
}

std::string rat_to_exact_decimal(const Rat& x) {
    Int num = x.get_num();
    Int den = x.get_den();
    bool neg = num < 0;
    if (neg) num = -num;
    // den must be 2^a * 5^b
    Int d = den;
    long a = 0, b = 0;
    while (d % 2 == 0) {
        d /= 2;
        ++a;
    }
    while (d % 5 == 0) {
        d /= 5;
        ++b;
    }
    if (d != 1) throw std::invalid_argument("rat_to_exact_decimal: denominator not 2^a*5^b");
    long k = std::max(a, b);
    Int scale = pow_int(2, static_cast<unsigned long>(k - a)) * pow_int(5, static_cast<unsigned long>(k - b));
    Int digits = num * scale;  // value = digits / 10^k
    std::string ds = digits.get_str();
    std::string out;
    if (k == 0) {
        out = ds;
    } else {
        while (static_cast<long>(ds.size()) <= k) ds.insert(ds.begin(), '0');
        std::string ip = ds.substr(0, ds.size() - k);
        std::string fp = ds.substr(ds.size() - k);
        while (!fp.empty() && fp.back() == '0') fp.pop_back();
        out = fp.empty() ? ip : ip + "." + fp;
    }
    return neg ? "-" + out : out;
}

PoE make_poe(std::vector<Int> bases, std::vector<Int> exponents) {
    PoE x;
    x.bases = std::move(bases);
    x.exponents = std::move(exponents);
    return normalize(x);
}

PoE poe_factor(const Int& base, const Int& exp) { return make_poe({base}, {exp}); }

PoE poe_from_rat(const Rat& r) {
    if (r <= 0) throw std::invalid_argument("poe_from_rat: value must be positive");
    return make_poe({r.get_num(), r.get_den()}, {1, -1});
}

PoE normalize(const PoE& x) {
    if (x.bases.size() != x.exponents.size())
        throw std::invalid_argument("PoE: base/exponent lists differ in length");
    std::map<Int, Int> merged;
    for (size_t i = 0; i < x.bases.size(); ++i) {
        const Int& b = x.bases[i];
        if (b <= 0) throw std::invalid_argument("PoE: base must be positive, got " + b.get_str());
        if (b == 1 || x.exponents[i] == 0) continue;
        merged[b] += x.exponents[i];
    }
    PoE out;
    for (auto& [b, e] : merged) {
        if (e == 0) continue;
        out.bases.push_back(b);
        out.exponents.push_back(e);
    }
    return out;
}

PoE mul(const PoE& x, const PoE& y) {
    PoE c;
    c.bases = x.bases;
    c.exponents = x.exponents;
    c.bases.insert(c.bases.end(), y.bases.begin(), y.bases.end());
    c.exponents.insert(c.exponents.end(), y.exponents.begin(), y.exponents.end());
    return normalize(c);
}

PoE div(const PoE& x, const PoE& y) {
    PoE c;
    c.bases = x.bases;
    c.exponents = x.exponents;
    c.bases.insert(c.bases.end(), y.bases.begin(), y.bases.end());
    for (const Int& e : y.exponents) c.exponents.push_back(-e);
    return normalize(c);
}

PoE pow(const PoE& x, const Int& k) {
    PoE c = x;
    for (Int& e : c.exponents) e *= k;
    return normalize(c);
}

Int expanded_size_bound(const PoE& x) {
    Int bits = 0;
    for (size_t i = 0; i < x.bases.size(); ++i) bits += abs(x.exponents[i]) * bit_length(x.bases[i]);
    return bits;
}

Rat eval_exact(const PoE& x, long bit_budget) {
    if (bit_budget <= 0) throw std::invalid_argument("eval_exact: bit_budget must be positive");
    if (expanded_size_bound(x) > bit_budget)
        throw BudgetExceeded("eval_exact: value needs more than " + std::to_string(bit_budget) +
                             " bits");
    Int num = 1, den = 1;
    for (size_t i = 0; i < x.bases.size(); ++i) {
        const Int& e = x.exponents[i];
        if (e > 0)
            num *= pow_int(x.bases[i], e.get_ui());
        else
            den *= pow_int(x.bases[i], Int(-e).get_ui());
    }
    return make_rat(num, den);
}

FourLists rearrange(const PoE& x, const PoE& y) {
    PoE xn = normalize(x), yn = normalize(y);
    FourLists f;
    for (size_t i = 0; i < xn.bases.size(); ++i) {
        if (xn.exponents[i] > 0) {
            f.a.push_back(xn.bases[i]);
            f.b.push_back(xn.exponents[i]);
        } else {
            f.c.push_back(xn.bases[i]);
            f.d.push_back(-xn.exponents[i]);
        }
    }
    for (size_t i = 0; i < yn.bases.size(); ++i) {
        if (yn.exponents[i] > 0) {
            f.c.push_back(yn.bases[i]);
            f.d.push_back(yn.exponents[i]);
        } else {
            f.a.push_back(yn.bases[i]);
            f.b.push_back(-yn.exponents[i]);
        }
    }
    return f;
}

EqualityTrace equals_trace(const PoE& x, const PoE& y, const Fig1Observer& observer) {
    FourLists f = rearrange(x, y);
    auto& a = f.a;
    auto& b = f.b;
    auto& c = f.c;
    auto& d = f.d;
    EqualityTrace tr;

    for (;;) {
        // Lexicographic scan for a pair with a nontrivial common factor;
        // restarted from scratch after every modification.
        bool found = false;
        size_t fi = 0, fj = 0;
        Int g;
        for (size_t i = 0; i < a.size() && !found; ++i) {
            for (size_t j = 0; j < c.size() && !found; ++j) {
                g = gcd(a[i], c[j]);
                if (g > 1) {
                    fi = i;
                    fj = j;
                    found = true;
                }
            }
        }
        if (!found) break;
        ++tr.iterations;

        Int be = b[fi], de = d[fj];
        a[fi] /= g;
        c[fj] /= g;
        if (a[fi] == 1) {
            a.erase(a.begin() + fi);
            b.erase(b.begin() + fi);
        }
        if (c[fj] == 1) {
            c.erase(c.begin() + fj);
            d.erase(d.begin() + fj);
        }
        if (be > de) {
            a.push_back(g);
            b.push_back(be - de);
        } else if (be < de) {
            c.push_back(g);
            d.push_back(de - be);
        }
        if (observer) observer(a, b, c, d);
    }

    tr.equal = a.empty() && c.empty();
    return tr;
}

bool equals(const PoE& x, const PoE& y) { return equals_trace(x, y).equal; }

namespace {

struct TextCursor {
    const std::string& s;
    size_t pos = 0;
    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool done() {
        skip_ws();
        return pos >= s.size();
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, 1, static_cast<int>(pos) + 1);
    }
    Int integer() {
        skip_ws();
        size_t start = pos;
        if (pos < s.size() && (s[pos] == '-' || s[pos] == '+')) ++pos;
        size_t digits = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos == digits) fail("expected integer");
        return Int(s.substr(start, pos - start));
    }
};

}  // namespace

PoE poe_from_text(const std::string& text) {
    TextCursor cur{text};
    PoE out;
    if (cur.done()) return out;  // empty string denotes 1
    bool divide = false;
    for (;;) {
        Int base = cur.integer();
        if (base <= 0) cur.fail("base must be positive");
        Int exp = 1;
        cur.skip_ws();
        if (cur.pos < text.size() && text[cur.pos] == '^') {
            ++cur.pos;
            exp = cur.integer();
        }
        if (divide) exp = -exp;
        out.bases.push_back(base);
        out.exponents.push_back(exp);
        if (cur.done()) break;
        char op = text[cur.pos];
        if (op == '*')
            divide = false;
        else if (op == '/')
            divide = true;
        else
            cur.fail("expected '*' or '/'");
        ++cur.pos;
    }
    return normalize(out);
}

std::string poe_to_text(const PoE& x) {
    PoE n = normalize(x);
    if (n.is_one()) return "1";
    std::ostringstream os;
    bool first = true;
    for (size_t i = 0; i < n.bases.size(); ++i) {
        bool neg = n.exponents[i] < 0;
        Int e = neg ? Int(-n.exponents[i]) : n.exponents[i];
        if (first) {
            if (neg) os << "1 / ";
        } else {
            os << (neg ? " / " : " * ");
        }
        os << n.bases[i].get_str() << "^" << e.get_str();
        first = false;
    }
    return os.str();
}

std::string poe_key(const PoE& x) {
    std::string k;
    for (size_t i = 0; i < x.bases.size(); ++i) {
        k += x.bases[i].get_str();
        k += '^';
        k += x.exponents[i].get_str();
        k += '|';
    }
    return k;
}

}  // namespace poe
