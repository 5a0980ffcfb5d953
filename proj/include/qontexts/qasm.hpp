#pragma once

#include <stdexcept>
#include <string>

#include "qontexts/circuit.hpp"

namespace qontexts::circuit {

struct ParseError : std::runtime_error {
    int line;
    int column;
    ParseError(int l, int c, const std::string& msg)
        : std::runtime_error("qasm:" + std::to_string(l) + ":" + std::to_string(c) + ": " + msg),
          line(l),
          column(c) {}
};

/// Parses the OPENQASM 2.0 subset: qreg/creg, h, x, z, rz, cx, measure,
/// barrier. Layers are rebuilt as-soon-as-possible; barriers terminate
/// layers and are not retained as gates.
Program parse_qasm(const std::string& text);

/// Emits the program with a barrier between consecutive layers so that
/// parse_qasm(emit_qasm(p)) is structurally equal to p.
std::string emit_qasm(const Program& p);

}  // namespace qontexts::circuit
