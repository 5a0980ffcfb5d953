#include "qontexts/circuit.hpp"

#include <algorithm>
#include <set>

namespace qontexts::circuit {

std::vector<int> Program::measured_qubits() const {
    std::set<int> qs;
    for (const auto& layer : layers)
        for (const auto& g : layer)
            if (g.kind == GateKind::Measure) qs.insert(g.q0);
    return {qs.begin(), qs.end()};
}

int Program::cx_count() const {
    int n = 0;
    for (const auto& layer : layers)
        for (const auto& g : layer)
            if (g.kind == GateKind::CX) ++n;
    return n;
}

void Program::validate() const {
    bool measuring = false;
    for (size_t t = 0; t < layers.size(); ++t) {
        std::set<int> used;
        bool layer_has_compute = false;
        for (const auto& g : layers[t]) {
            if (g.q0 < 0 || g.q0 >= n_qubits ||
                (g.kind == GateKind::CX && (g.q1 < 0 || g.q1 >= n_qubits)))
                throw CircuitError(id + ": gate operand out of range in layer " + std::to_string(t));
            if (g.kind == GateKind::CX && g.q0 == g.q1)
                throw CircuitError(id + ": CX control equals target");
            if (g.kind == GateKind::Barrier) continue;
            if (!used.insert(g.q0).second)
                throw CircuitError(id + ": qubit " + std::to_string(g.q0) +
                                   " used twice in layer " + std::to_string(t));
            if (g.kind == GateKind::CX && !used.insert(g.q1).second)
                throw CircuitError(id + ": qubit " + std::to_string(g.q1) +
                                   " used twice in layer " + std::to_string(t));
            if (g.kind == GateKind::Measure)
                measuring = true;
            else
                layer_has_compute = true;
        }
        if (measuring && layer_has_compute)
            throw CircuitError(id + ": gate after measurement in layer " + std::to_string(t));
    }
}

void LayerBuilder::add(const Gate& g) {
    if (g.kind == GateKind::Barrier) {
        fence();
        return;
    }
    int at = fence_level_;
    at = std::max(at, frontier_.at(g.q0));
    if (g.is_two_qubit()) at = std::max(at, frontier_.at(g.q1));
    if (at >= static_cast<int>(layers_.size())) layers_.resize(at + 1);
    layers_[at].push_back(g);
    frontier_[g.q0] = at + 1;
    if (g.is_two_qubit()) frontier_[g.q1] = at + 1;
}

void LayerBuilder::fence() { fence_level_ = static_cast<int>(layers_.size()); }

namespace {

std::vector<Layer> normalized_layers(const Program& p) {
    std::vector<Layer> out;
    for (const auto& layer : p.layers) {
        Layer kept;
        for (const auto& g : layer)
            if (g.kind != GateKind::Barrier) kept.push_back(g);
        if (kept.empty()) continue;
        std::sort(kept.begin(), kept.end(), [](const Gate& a, const Gate& b) {
            if (a.q0 != b.q0) return a.q0 < b.q0;
            if (a.q1 != b.q1) return a.q1 < b.q1;
            return static_cast<int>(a.kind) < static_cast<int>(b.kind);
        });
        out.push_back(std::move(kept));
    }
    return out;
}

}  // namespace

bool structurally_equal(const Program& a, const Program& b) {
    if (a.n_qubits != b.n_qubits) return false;
    auto la = normalized_layers(a);
    auto lb = normalized_layers(b);
    if (la.size() != lb.size()) return false;
    for (size_t i = 0; i < la.size(); ++i)
        if (la[i] != lb[i]) return false;
    return true;
}

void MappedProgram::validate(const topology::Device& dev) const {
    if (static_cast<int>(qubit_map.size()) != program.n_qubits)
        throw CircuitError(program.id + ": qubit map size mismatch");
    std::set<int> targets(qubit_map.begin(), qubit_map.end());
    if (targets.size() != qubit_map.size())
        throw CircuitError(program.id + ": qubit map is not injective");
    std::set<int> region_set(region.qubits.begin(), region.qubits.end());
    if (targets != region_set)
        throw CircuitError(program.id + ": qubit map is not onto its region");
    for (int q : qubit_map)
        if (q < 0 || q >= dev.n_qubits)
            throw CircuitError(program.id + ": mapped qubit out of device range");
}

MappedProgram map_onto_region(const Program& p, const topology::Region& region) {
    if (static_cast<int>(region.qubits.size()) != p.n_qubits)
        throw CircuitError(p.id + ": region size " + std::to_string(region.qubits.size()) +
                           " != program width " + std::to_string(p.n_qubits));
    MappedProgram mp;
    mp.program = p;
    mp.region = region;
    mp.qubit_map = region.qubits;
    return mp;
}

}  // namespace qontexts::circuit
