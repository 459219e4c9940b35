#include "poeparse/circuit.hpp"

#include <map>
#include <sstream>

namespace poe {

int Circuit::add_input(const Int& v) {
    gates.push_back({Op::Input, v, -1, -1});
    return static_cast<int>(gates.size()) - 1;
}

int Circuit::add_mul(int l, int r) {
    gates.push_back({Op::Mul, 0, l, r});
    return static_cast<int>(gates.size()) - 1;
}

int Circuit::add_div(int l, int r) {
    gates.push_back({Op::Div, 0, l, r});
    return static_cast<int>(gates.size()) - 1;
}

void validate(const Circuit& c) {
    if (c.gates.empty()) throw std::invalid_argument("circuit: no gates");
    for (size_t i = 0; i < c.gates.size(); ++i) {
        const auto& g = c.gates[i];
        if (g.op == Circuit::Op::Input) {
            if (g.value <= 0) throw std::invalid_argument("circuit: input must be positive");
        } else {
            if (g.lhs < 0 || g.rhs < 0 || g.lhs >= static_cast<int>(i) ||
                g.rhs >= static_cast<int>(i))
                throw std::invalid_argument("circuit: gate " + std::to_string(i) +
                                            " references a non-earlier gate");
        }
    }
    if (c.output < 0 || c.output >= static_cast<int>(c.gates.size()))
        throw std::invalid_argument("circuit: missing or invalid output gate");
}

PoE from_circuit(const Circuit& c) {
    validate(c);
    // Sparse exponent vector per gate, indexed by input-gate position.
    std::vector<std::map<int, Int>> exp(c.gates.size());
    for (size_t i = 0; i < c.gates.size(); ++i) {
        const auto& g = c.gates[i];
        switch (g.op) {
            case Circuit::Op::Input:
                exp[i][static_cast<int>(i)] = 1;
                break;
            case Circuit::Op::Mul: {
                exp[i] = exp[g.lhs];
                for (auto& [k, v] : exp[g.rhs]) exp[i][k] += v;
                break;
            }
            case Circuit::Op::Div: {
                exp[i] = exp[g.lhs];
                for (auto& [k, v] : exp[g.rhs]) exp[i][k] -= v;
                break;
            }
        }
    }
    PoE out;
    for (auto& [gate, e] : exp[c.output]) {
        out.bases.push_back(c.gates[gate].value);
        out.exponents.push_back(e);
    }
    return normalize(out);
}

namespace {

// Gate computing base^e (e >= 1) by square-and-multiply over the bits of e.
int power_chain(Circuit& c, int base_gate, const Int& e) {
    long bits = bit_length(e);
    int acc = base_gate;
    for (long i = bits - 2; i >= 0; --i) {
        acc = c.add_mul(acc, acc);
        if (mpz_tstbit(e.get_mpz_t(), static_cast<mp_bitcnt_t>(i))) acc = c.add_mul(acc, base_gate);
    }
    return acc;
}

}  // namespace

Circuit to_circuit(const PoE& x) {
    PoE n = normalize(x);
    Circuit c;
    if (n.is_one()) {
        c.output = c.add_input(1);
        return c;
    }
    int pos = -1, neg = -1;
    for (size_t i = 0; i < n.bases.size(); ++i) {
        int in = c.add_input(n.bases[i]);
        const Int& e = n.exponents[i];
        int p = power_chain(c, in, abs(e));
        if (e > 0)
            pos = pos < 0 ? p : c.add_mul(pos, p);
        else
            neg = neg < 0 ? p : c.add_mul(neg, p);
    }
    if (pos < 0) pos = c.add_input(1);
    c.output = neg < 0 ? pos : c.add_div(pos, neg);
    return c;
}

Rat eval_circuit(const Circuit& c, long bit_budget) {
    validate(c);
    std::vector<Rat> val(c.gates.size());
    for (size_t i = 0; i < c.gates.size(); ++i) {
        const auto& g = c.gates[i];
        switch (g.op) {
            case Circuit::Op::Input:
                val[i] = Rat(g.value);
                break;
            case Circuit::Op::Mul:
                val[i] = val[g.lhs] * val[g.rhs];
                break;
            case Circuit::Op::Div:
                val[i] = val[g.lhs] / val[g.rhs];
                break;
        }
        if (bit_length(val[i].get_num()) + bit_length(val[i].get_den()) > bit_budget)
            throw BudgetExceeded("eval_circuit: intermediate value exceeds bit budget");
    }
    return val[c.output];
}

Circuit circuit_from_text(const std::string& text) {
    Circuit c;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool saw_output = false;
    auto gate_ref = [&](const std::string& tok, int limit) {
        if (tok.size() < 2 || tok[0] != 'g')
            throw ParseError("expected gate reference, got '" + tok + "'", lineno, 1);
        int idx;
        try {
            idx = std::stoi(tok.substr(1));
        } catch (...) {
            throw ParseError("bad gate reference '" + tok + "'", lineno, 1);
        }
        if (idx < 0 || idx >= limit)
            throw ParseError("gate reference '" + tok + "' not yet defined", lineno, 1);
        return idx;
    };
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;  // blank line
        if (saw_output) throw ParseError("trailing content after output line", lineno, 1);
        if (tok == "output") {
            std::string ref;
            if (!(ls >> ref)) throw ParseError("output line needs a gate", lineno, 1);
            c.output = gate_ref(ref, static_cast<int>(c.gates.size()));
            std::string extra;
            if (ls >> extra) throw ParseError("trailing garbage '" + extra + "'", lineno, 1);
            saw_output = true;
            continue;
        }
        int expect = static_cast<int>(c.gates.size());
        if (tok != "g" + std::to_string(expect))
            throw ParseError("expected gate g" + std::to_string(expect) + ", got '" + tok + "'",
                             lineno, 1);
        std::string eq, op;
        if (!(ls >> eq >> op) || eq != "=")
            throw ParseError("expected '= <op>' after gate name", lineno, 1);
        if (op == "input") {
            std::string num;
            if (!(ls >> num)) throw ParseError("input gate needs a value", lineno, 1);
            Int v;
            try {
                v = Int(num);
            } catch (...) {
                throw ParseError("bad input value '" + num + "'", lineno, 1);
            }
            if (v <= 0) throw ParseError("input must be positive", lineno, 1);
            c.add_input(v);
        } else if (op == "mul" || op == "div") {
            std::string l, r;
            if (!(ls >> l >> r)) throw ParseError(op + " gate needs two operands", lineno, 1);
            int li = gate_ref(l, expect), ri = gate_ref(r, expect);
            if (op == "mul")
                c.add_mul(li, ri);
            else
                c.add_div(li, ri);
        } else {
            throw ParseError("unknown gate op '" + op + "'", lineno, 1);
        }
        std::string extra;
        if (ls >> extra) throw ParseError("trailing garbage '" + extra + "'", lineno, 1);
    }
    if (!saw_output) throw ParseError("missing output line", lineno, 1);
    validate(c);
    return c;
}

std::string circuit_to_text(const Circuit& c) {
    std::ostringstream os;
    for (size_t i = 0; i < c.gates.size(); ++i) {
        const auto& g = c.gates[i];
        os << "g" << i << " = ";
        switch (g.op) {
            case Circuit::Op::Input:
                os << "input " << g.value.get_str();
                break;
            case Circuit::Op::Mul:
                os << "mul g" << g.lhs << " g" << g.rhs;
                break;
            case Circuit::Op::Div:
                os << "div g" << g.lhs << " g" << g.rhs;
                break;
        }
        os << "\n";
    }
    os << "output g" << c.output << "\n";
    return os.str();
}

}  // namespace poe
