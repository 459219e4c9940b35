#pragma once

#include <string>
#include <vector>

#include "poeparse/poe.hpp"

namespace poe {

/*
 * Arithmetic circuit over {*, /} with positive integer inputs: a straight-line
 * program whose gates reference strictly earlier gates, with one designated
 * output. Equivalent in expressive power to PoE.
 */
struct Circuit {
    enum class Op { Input, Mul, Div };
    struct Gate {
        Op op;
        Int value;       // Input only
        int lhs = -1;    // Mul/Div operands
        int rhs = -1;
    };
    std::vector<Gate> gates;
    int output = -1;

    int add_input(const Int& v);
    int add_mul(int l, int r);
    int add_div(int l, int r);
};

// Checks topological references and the output designation; throws on defect.
void validate(const Circuit& c);

// PoE over the circuit's input values, built gate by gate bottom-up: a gate at
// depth d yields exponent magnitudes at most 2^d. Result is normalized.
PoE from_circuit(const Circuit& c);

// Circuit computing x via repeated squaring per base (O(sum_i log|e_i|)
// gates); negative exponents are gathered into a single final division.
Circuit to_circuit(const PoE& x);

// Exact evaluation (test/tooling oracle); throws BudgetExceeded when any
// intermediate value would exceed bit_budget bits.
Rat eval_circuit(const Circuit& c, long bit_budget);

// One gate per line: `g0 = input 7`, `g1 = mul g0 g0`, `g2 = div g1 g0`,
// final line `output g2`. Gate indices must be dense and in order.
Circuit circuit_from_text(const std::string& text);
std::string circuit_to_text(const Circuit& c);

}  // namespace poe
