#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "qontexts/topology.hpp"

namespace qontexts::circuit {

enum class GateKind { H, X, Z, RZ, CX, Measure, Barrier };

struct Gate {
    GateKind kind = GateKind::H;
    int q0 = 0;        // target (1q gates, measure) or control (CX)
    int q1 = -1;       // CX target; unused otherwise
    double angle = 0;  // RZ only

    static Gate h(int q) { return {GateKind::H, q, -1, 0}; }
    static Gate x(int q) { return {GateKind::X, q, -1, 0}; }
    static Gate z(int q) { return {GateKind::Z, q, -1, 0}; }
    static Gate rz(int q, double theta) { return {GateKind::RZ, q, -1, theta}; }
    static Gate cx(int control, int target) { return {GateKind::CX, control, target, 0}; }
    static Gate measure(int q) { return {GateKind::Measure, q, -1, 0}; }

    bool is_two_qubit() const { return kind == GateKind::CX; }

    bool operator==(const Gate& g) const {
        return kind == g.kind && q0 == g.q0 && q1 == g.q1 && angle == g.angle;
    }
};

using Layer = std::vector<Gate>;

/// Layered gate program. Gates within one layer act on disjoint qubits
/// and execute concurrently; measurements appear only in final layers.
struct Program {
    std::string id;
    int n_qubits = 0;
    std::vector<Layer> layers;
    long requested_trials = 8000;

    /// Qubits carrying a Measure gate, ascending. Empty means
    /// "measure everything" to downstream consumers.
    std::vector<int> measured_qubits() const;

    int cx_count() const;

    void validate() const;  // throws CircuitError on invariant violations
};

struct CircuitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Appends gates one at a time, placing each in the earliest layer that
/// has all of its qubits free (as-soon-as-possible). `fence` closes all
/// open layers, so later gates start strictly afterwards.
class LayerBuilder {
public:
    explicit LayerBuilder(int n_qubits) : frontier_(n_qubits, 0) {}

    void add(const Gate& g);
    void fence();

    std::vector<Layer> take() && { return std::move(layers_); }

private:
    std::vector<Layer> layers_;
    std::vector<int> frontier_;  // first free layer per qubit
    int fence_level_ = 0;
};

/// Layer-by-layer equality ignoring barriers and empty layers; gate
/// order within a layer is immaterial.
bool structurally_equal(const Program& a, const Program& b);

/// Program placed onto a device region. qubit_map[i] is the physical
/// qubit carrying logical qubit i.
struct MappedProgram {
    Program program;
    topology::Region region;
    std::vector<int> qubit_map;

    void validate(const topology::Device& dev) const;

    /// Physical link used by a CX gate.
    topology::Link physical_link(const Gate& g) const {
        return topology::Link(qubit_map.at(g.q0), qubit_map.at(g.q1));
    }
};

/// Maps logical qubit i onto region.qubits[i].
MappedProgram map_onto_region(const Program& p, const topology::Region& region);

}  // namespace qontexts::circuit
