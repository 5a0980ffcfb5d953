#include "qontexts/qasm.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace qontexts::circuit {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Cursor {
    const std::string& text;
    size_t pos = 0;
    int line = 1;
    int col = 1;

    bool eof() const { return pos >= text.size(); }
    char peek() const { return eof() ? '\0' : text[pos]; }

    char advance() {
        char c = text[pos++];
        if (c == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        return c;
    }

    void skip_space_and_comments() {
        while (!eof()) {
            char c = peek();
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '/' && pos + 1 < text.size() && text[pos + 1] == '/') {
                while (!eof() && peek() != '\n') advance();
            } else {
                break;
            }
        }
    }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line, col, msg); }

    std::string ident() {
        skip_space_and_comments();
        if (eof() || !(std::isalpha(static_cast<unsigned char>(peek())) || peek() == '_'))
            fail("expected identifier");
        std::string out;
        while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_'))
            out.push_back(advance());
        return out;
    }

    void expect(char c) {
        skip_space_and_comments();
        if (eof() || peek() != c) fail(std::string("expected '") + c + "'");
        advance();
    }

    bool accept(char c) {
        skip_space_and_comments();
        if (!eof() && peek() == c) {
            advance();
            return true;
        }
        return false;
    }

    long integer() {
        skip_space_and_comments();
        if (eof() || !std::isdigit(static_cast<unsigned char>(peek()))) fail("expected integer");
        long v = 0;
        while (!eof() && std::isdigit(static_cast<unsigned char>(peek())))
            v = v * 10 + (advance() - '0');
        return v;
    }
};

// Angle expressions: numbers, pi, + - * /, unary minus, parentheses.
class AngleParser {
public:
    explicit AngleParser(Cursor& c) : c_(c) {}

    double parse() { return expr(); }

private:
    Cursor& c_;

    double expr() {
        double v = term();
        for (;;) {
            if (c_.accept('+'))
                v += term();
            else if (c_.accept('-'))
                v -= term();
            else
                return v;
        }
    }

    double term() {
        double v = factor();
        for (;;) {
            if (c_.accept('*'))
                v *= factor();
            else if (c_.accept('/'))
                v /= factor();
            else
                return v;
        }
    }

    double factor() {
        c_.skip_space_and_comments();
        if (c_.accept('-')) return -factor();
        if (c_.accept('(')) {
            double v = expr();
            c_.expect(')');
            return v;
        }
        if (std::isdigit(static_cast<unsigned char>(c_.peek())) || c_.peek() == '.') return number();
        std::string name = c_.ident();
        if (name == "pi") return kPi;
        c_.fail("unknown symbol in angle expression: " + name);
    }

    double number() {
        std::string out;
        while (!c_.eof()) {
            char ch = c_.peek();
            if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.' || ch == 'e' ||
                ch == 'E') {
                out.push_back(c_.advance());
            } else if ((ch == '+' || ch == '-') && !out.empty() &&
                       (out.back() == 'e' || out.back() == 'E')) {
                out.push_back(c_.advance());
            } else {
                break;
            }
        }
        try {
            return std::stod(out);
        } catch (...) {
            c_.fail("bad numeric literal: " + out);
        }
    }
};

}  // namespace

Program parse_qasm(const std::string& text) {
    Cursor c{text};
    std::string qreg_name;
    int qreg_size = 0;
    bool have_qreg = false;

    std::vector<Gate> sequence;
    std::vector<size_t> fences;  // indices into sequence where a barrier sits

    auto parse_qubit = [&](void) -> int {
        std::string name = c.ident();
        if (!have_qreg || name != qreg_name) c.fail("unknown register: " + name);
        c.expect('[');
        long idx = c.integer();
        c.expect(']');
        if (idx < 0 || idx >= qreg_size) c.fail("qubit index out of range");
        return static_cast<int>(idx);
    };

    c.skip_space_and_comments();
    while (!c.eof()) {
        std::string word = c.ident();
        if (word == "OPENQASM") {
            c.skip_space_and_comments();
            while (!c.eof() && c.peek() != ';') c.advance();
            c.expect(';');
        } else if (word == "include") {
            while (!c.eof() && c.peek() != ';') c.advance();
            c.expect(';');
        } else if (word == "qreg") {
            if (have_qreg) c.fail("only one qreg supported");
            qreg_name = c.ident();
            c.expect('[');
            qreg_size = static_cast<int>(c.integer());
            c.expect(']');
            c.expect(';');
            have_qreg = true;
        } else if (word == "creg") {
            c.ident();
            c.expect('[');
            c.integer();
            c.expect(']');
            c.expect(';');
        } else if (word == "h" || word == "x" || word == "z") {
            int q = parse_qubit();
            c.expect(';');
            sequence.push_back(word == "h" ? Gate::h(q) : word == "x" ? Gate::x(q) : Gate::z(q));
        } else if (word == "rz") {
            c.expect('(');
            AngleParser ap(c);
            double theta = ap.parse();
            c.expect(')');
            int q = parse_qubit();
            c.expect(';');
            sequence.push_back(Gate::rz(q, theta));
        } else if (word == "cx") {
            int a = parse_qubit();
            c.expect(',');
            int b = parse_qubit();
            c.expect(';');
            if (a == b) c.fail("cx control equals target");
            sequence.push_back(Gate::cx(a, b));
        } else if (word == "measure") {
            c.skip_space_and_comments();
            std::string name = c.ident();
            if (!have_qreg || name != qreg_name) c.fail("unknown register: " + name);
            std::vector<int> qs;
            if (c.accept('[')) {
                long idx = c.integer();
                c.expect(']');
                if (idx < 0 || idx >= qreg_size) c.fail("qubit index out of range");
                qs.push_back(static_cast<int>(idx));
            } else {
                for (int q = 0; q < qreg_size; ++q) qs.push_back(q);
            }
            c.skip_space_and_comments();
            if (c.accept('-')) {
                c.expect('>');
                c.ident();
                if (c.accept('[')) {
                    c.integer();
                    c.expect(']');
                }
            }
            c.expect(';');
            for (int q : qs) sequence.push_back(Gate::measure(q));
        } else if (word == "barrier") {
            // operands are irrelevant: a barrier fences the whole program
            while (!c.eof() && c.peek() != ';') c.advance();
            c.expect(';');
            fences.push_back(sequence.size());
        } else {
            c.fail("unsupported gate: " + word);
        }
        c.skip_space_and_comments();
    }

    if (!have_qreg && !sequence.empty()) throw ParseError(1, 1, "missing qreg declaration");

    Program p;
    p.n_qubits = qreg_size;
    LayerBuilder builder(qreg_size);
    size_t fence_at = 0;
    for (size_t i = 0; i <= sequence.size(); ++i) {
        while (fence_at < fences.size() && fences[fence_at] == i) {
            builder.fence();
            ++fence_at;
        }
        if (i < sequence.size()) builder.add(sequence[i]);
    }
    p.layers = std::move(builder).take();
    p.validate();
    return p;
}

std::string emit_qasm(const Program& p) {
    std::ostringstream out;
    out << "OPENQASM 2.0;\n";
    out << "include \"qelib1.inc\";\n";
    if (p.n_qubits > 0) {
        out << "qreg q[" << p.n_qubits << "];\n";
        out << "creg c[" << p.n_qubits << "];\n";
    }
    bool first_layer = true;
    for (const auto& layer : p.layers) {
        bool has_gates = false;
        for (const auto& g : layer)
            if (g.kind != GateKind::Barrier) has_gates = true;
        if (!has_gates) continue;
        if (!first_layer) out << "barrier q;\n";
        first_layer = false;
        for (const auto& g : layer) {
            switch (g.kind) {
                case GateKind::H: out << "h q[" << g.q0 << "];\n"; break;
                case GateKind::X: out << "x q[" << g.q0 << "];\n"; break;
                case GateKind::Z: out << "z q[" << g.q0 << "];\n"; break;
                case GateKind::RZ: {
                    std::ostringstream num;
                    num.precision(17);
                    num << g.angle;
                    out << "rz(" << num.str() << ") q[" << g.q0 << "];\n";
                    break;
                }
                case GateKind::CX: out << "cx q[" << g.q0 << "],q[" << g.q1 << "];\n"; break;
                case GateKind::Measure:
                    out << "measure q[" << g.q0 << "] -> c[" << g.q0 << "];\n";
                    break;
                case GateKind::Barrier: break;
            }
        }
    }
    return out.str();
}

}  // namespace qontexts::circuit
