#include "poeparse/compare.hpp"

#include <map>
#include <sstream>

namespace poe {

CompareMode CompareMode::adaptive(long max_bits) {
    if (max_bits < 64) throw std::invalid_argument("adaptive mode: max_bits must be >= 64");
    CompareMode m;
    m.kind = Kind::Adaptive;
    m.max_bits = max_bits;
    return m;
}

CompareMode CompareMode::unconditional(Int gap_cap) {
    if (gap_cap <= 0) throw std::invalid_argument("unconditional mode: cap must be positive");
    CompareMode m;
    m.kind = Kind::Unconditional;
    m.gap_cap = gap_cap;
    return m;
}

CompareMode CompareMode::lang_waldschmidt(const Rat& eps, const Rat& c) {
    if (eps <= 0 || c <= 0)
        throw std::invalid_argument("lang-waldschmidt mode: parameters must be positive");
    CompareMode m;
    m.kind = Kind::LangWaldschmidt;
    m.eps = eps;
    m.c_const = c;
    return m;
}

CompareMode CompareMode::baker_abc(const Rat& k2) {
    if (k2 <= 0) throw std::invalid_argument("baker-abc mode: K'' must be positive");
    CompareMode m;
    m.kind = Kind::BakerAbc;
    m.k2_const = k2;
    return m;
}

std::string CompareMode::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::Adaptive:
            os << "adaptive(max_bits=" << max_bits << ")";
            break;
        case Kind::Unconditional:
            os << "unconditional(bw/matveev, cap=2^" << bit_length(gap_cap) - 1 << ")";
            break;
        case Kind::LangWaldschmidt:
            os << "lang-waldschmidt(eps=" << eps.get_str() << ", C=" << c_const.get_str() << ")";
            break;
        case Kind::BakerAbc:
            os << "baker-abc(K''=" << k2_const.get_str() << ")";
            break;
    }
    return os.str();
}

const char* ordering_name(Ordering o) {
    switch (o) {
        case Ordering::Less: return "LESS";
        case Ordering::Equal: return "EQUAL";
        case Ordering::Greater: return "GREATER";
        case Ordering::Unresolved: return "UNRESOLVED";
    }
    return "?";
}

std::optional<LinearForm> quotient_form(const PoE& x, const PoE& y) {
    PoE q = div(x, y);
    if (q.is_one()) return std::nullopt;
    return make_linear_form(q.bases, q.exponents);
}

namespace {

// Sign certified as soon as |v| clears twice the error bound 2^-j.
int certified_sign(const Rat& v, long j) {
    Rat band = pow2_rat(-j + 1);
    if (v > band) return 1;
    if (v < -band) return -1;
    return 0;
}

CompareOutcome resolved(Ordering o, Certificate cert) { return {o, std::move(cert)}; }

}  // namespace

CompareOutcome compare(const PoE& x, const PoE& y, const CompareMode& mode) {
    Certificate cert;
    cert.mode = mode.describe();

    if (equals(x, y)) {
        cert.precision_bits = 0;
        return resolved(Ordering::Equal, std::move(cert));
    }

    // Not equal, so Lambda = log(x) - log(y) is nonzero and has a sign.
    auto form = quotient_form(x, y);
    if (!form) {
        // Identical normalized forms would have been caught by equals().
        throw std::logic_error("compare: empty quotient after inequality");
    }

    if (mode.kind == CompareMode::Kind::Adaptive) {
        for (long j = 64; j <= mode.max_bits; j *= 2) {
            Rat v = linear_form_approx(*form, j).value;
            int s = certified_sign(v, j);
            if (s != 0) {
                cert.precision_bits = j;
                cert.value = v;
                return resolved(s > 0 ? Ordering::Greater : Ordering::Less, std::move(cert));
            }
        }
        cert.precision_bits = mode.max_bits;
        return resolved(Ordering::Unresolved, std::move(cert));
    }

    GapBound gap;
    switch (mode.kind) {
        case CompareMode::Kind::Unconditional: {
            // The smaller of the two valid unconditional gaps wins; refuse
            // only when both exceed the cap.
            std::optional<GapBound> g1, g2;
            try {
                g1 = bw_gap(*form, mode.gap_cap);
            } catch (const OverflowGuard&) {}
            try {
                g2 = matveev_gap(*form, mode.gap_cap);
            } catch (const OverflowGuard&) {}
            if (!g1 && !g2)
                throw OverflowGuard("unconditional gap bounds exceed cap " +
                                    mode.gap_cap.get_str() + " bits; use adaptive mode");
            if (g1 && g2)
                gap = g2->log2_gap < g1->log2_gap ? *g2 : *g1;
            else
                gap = g1 ? *g1 : *g2;
            cert.mode += gap.regime == GapRegime::Matveev ? " [matveev gap]"
                                                          : " [baker-wustholz gap]";
            break;
        }
        case CompareMode::Kind::LangWaldschmidt:
            gap = lw_gap(*form, mode.eps, mode.c_const);
            break;
        case CompareMode::Kind::BakerAbc:
            gap = baker_abc_gap(*form, mode.k2_const);
            break;
        default:
            throw std::logic_error("compare: unreachable mode");
    }
    cert.gap_bits = gap.log2_gap;

    // Escalate precision toward the terminal step j* = gap + 1 (where the
    // sign rule v >= 0 decides unconditionally); any earlier certified sign
    // is provably the same answer.
    Int target = gap.log2_gap + 1;
    for (long j = 64;; j *= 2) {
        if (j > (1l << 40))
            throw std::runtime_error("compare: precision escalation exceeded 2^40 bits");
        bool final_step = Int(j) >= target;
        if (final_step && target.fits_slong_p()) j = std::max(64l, target.get_si());
        Rat v = linear_form_approx(*form, j).value;
        cert.precision_bits = j;
        cert.value = v;
        int s = certified_sign(v, j);
        if (s != 0)
            return resolved(s > 0 ? Ordering::Greater : Ordering::Less, std::move(cert));
        if (final_step)
            return resolved(v >= 0 ? Ordering::Greater : Ordering::Less, std::move(cert));
    }
}

CompareOutcome compare_circuit(const Circuit& cx, const Circuit& cy, const CompareMode& mode) {
    return compare(from_circuit(cx), from_circuit(cy), mode);
}

}  // namespace poe
