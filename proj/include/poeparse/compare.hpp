#pragma once

#include <optional>
#include <string>

#include "poeparse/circuit.hpp"
#include "poeparse/logform.hpp"
#include "poeparse/poe.hpp"

namespace poe {

/*
 * Three-way comparison of PoE numbers: an exact equality pass (gcd
 * refinement) followed, when unequal, by sign determination of the linear
 * form Lambda = log(x) - log(y) under a selectable certification regime.
 */
struct CompareMode {
    enum class Kind { Adaptive, Unconditional, LangWaldschmidt, BakerAbc };
    Kind kind = Kind::Adaptive;

    long max_bits = 1 << 20;      // Adaptive: precision cap before Unresolved
    Rat eps = 1;                  // LangWaldschmidt
    Rat c_const = 1;              // LangWaldschmidt
    Rat k2_const = 1;             // BakerAbc
    Int gap_cap = default_gap_cap();  // Unconditional refusal threshold

    static CompareMode adaptive(long max_bits = 1 << 20);
    static CompareMode unconditional(Int gap_cap = default_gap_cap());
    static CompareMode lang_waldschmidt(const Rat& eps, const Rat& c);
    static CompareMode baker_abc(const Rat& k2);

    std::string describe() const;
};

enum class Ordering { Less, Equal, Greater, Unresolved };

struct Certificate {
    std::string mode;
    long precision_bits = 0;      // log-approximation bits actually spent
    Int gap_bits = 0;             // certified gap (0 in Adaptive mode)
    std::optional<Rat> value;     // final dyadic approximation of Lambda
};

// Equal can only come from the exact refinement pass, never from
// approximation; Unresolved only from Adaptive mode at its precision cap.
struct CompareOutcome {
    Ordering ordering;
    Certificate certificate;
};

CompareOutcome compare(const PoE& x, const PoE& y, const CompareMode& mode = CompareMode::adaptive());

CompareOutcome compare_circuit(const Circuit& cx, const Circuit& cy,
                               const CompareMode& mode = CompareMode::adaptive());

// The signed merged form of log(x) - log(y); nullopt when x and y have
// identical normalized representations (Lambda identically zero).
std::optional<LinearForm> quotient_form(const PoE& x, const PoE& y);

const char* ordering_name(Ordering o);

}  // namespace poe
