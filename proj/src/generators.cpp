#include "qontexts/generators.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include <json.hpp>

namespace qontexts::circuit {

using nlohmann::json;

void Graph::validate() const {
    if (n_nodes <= 0) throw CircuitError("graph has no nodes");
    std::set<std::pair<int, int>> seen;
    for (const auto& [a, b, w] : edges) {
        (void)w;
        if (a == b) throw CircuitError("graph self-loop on node " + std::to_string(a));
        if (a < 0 || b < 0 || a >= n_nodes || b >= n_nodes)
            throw CircuitError("graph edge endpoint out of range");
        auto key = std::minmax(a, b);
        if (!seen.insert(key).second) throw CircuitError("duplicate graph edge");
    }
}

Graph graph_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CircuitError("cannot open graph file: " + path);
    json j;
    in >> j;
    Graph g;
    g.n_nodes = j.at("n_nodes").get<int>();
    for (const auto& e : j.at("edges")) {
        double w = e.size() > 2 ? e[2].get<double>() : 1.0;
        g.edges.emplace_back(e[0].get<int>(), e[1].get<int>(), w);
    }
    g.validate();
    return g;
}

void graph_to_json_file(const Graph& g, const std::string& path) {
    json j;
    j["n_nodes"] = g.n_nodes;
    j["edges"] = json::array();
    for (const auto& [a, b, w] : g.edges) j["edges"].push_back({a, b, w});
    std::ofstream out(path);
    out << j.dump(1) << "\n";
}

Program gen_bv(const std::string& secret) {
    if (secret.empty()) throw CircuitError("empty secret");
    for (char ch : secret)
        if (ch != '0' && ch != '1') throw CircuitError("secret must be a bitstring");
    int n = static_cast<int>(secret.size());
    Program p;
    p.id = "bv-" + secret;
    p.n_qubits = n + 1;
    LayerBuilder b(p.n_qubits);
    b.add(Gate::x(n));  // ancilla to |1>
    for (int q = 0; q <= n; ++q) b.add(Gate::h(q));
    for (int q = 0; q < n; ++q)
        if (secret[q] == '1') b.add(Gate::cx(q, n));
    b.fence();
    for (int q = 0; q < n; ++q) b.add(Gate::h(q));
    b.fence();
    for (int q = 0; q < n; ++q) b.add(Gate::measure(q));
    p.layers = std::move(b).take();
    p.validate();
    return p;
}

Program gen_ghz(int n) {
    if (n < 2) throw CircuitError("ghz needs at least 2 qubits");
    Program p;
    p.id = "ghz-" + std::to_string(n);
    p.n_qubits = n;
    LayerBuilder b(n);
    b.add(Gate::h(0));
    for (int q = 0; q + 1 < n; ++q) b.add(Gate::cx(q, q + 1));
    b.fence();
    for (int q = 0; q < n; ++q) b.add(Gate::measure(q));
    p.layers = std::move(b).take();
    p.validate();
    return p;
}

Program gen_qaoa_maxcut(const Graph& g, int p_layers, const std::vector<double>& gamma,
                        const std::vector<double>& beta) {
    g.validate();
    if (g.edges.empty()) throw CircuitError("qaoa graph has no edges");
    if (p_layers < 1 || static_cast<int>(gamma.size()) != p_layers ||
        static_cast<int>(beta.size()) != p_layers)
        throw CircuitError("qaoa needs |gamma| == |beta| == p >= 1");
    Program p;
    p.id = "qaoa-p" + std::to_string(p_layers);
    p.n_qubits = g.n_nodes;
    LayerBuilder b(g.n_nodes);
    for (int q = 0; q < g.n_nodes; ++q) b.add(Gate::h(q));
    for (int l = 0; l < p_layers; ++l) {
        for (const auto& [u, v, w] : g.edges) {
            b.add(Gate::cx(u, v));
            b.add(Gate::rz(v, 2.0 * gamma[l] * w));
            b.add(Gate::cx(u, v));
        }
        b.fence();
        for (int q = 0; q < g.n_nodes; ++q) {
            b.add(Gate::h(q));
            b.add(Gate::rz(q, 2.0 * beta[l]));
            b.add(Gate::h(q));
        }
        b.fence();
    }
    for (int q = 0; q < g.n_nodes; ++q) b.add(Gate::measure(q));
    p.layers = std::move(b).take();
    p.validate();
    return p;
}

std::pair<Program, Program> gen_microbenchmarks(const topology::Link& victim,
                                                const std::vector<topology::Link>& attack_links,
                                                int depth, double prep_angle) {
    std::set<int> used{victim.a, victim.b};
    for (const auto& l : attack_links) {
        if (!used.insert(l.a).second || !used.insert(l.b).second)
            throw CircuitError("micro-benchmark links overlap");
    }
    if (depth < 1) throw CircuitError("micro-benchmark depth must be >= 1");

    auto build = [&](int n_attack) {
        Program p;
        p.n_qubits = 2 + 2 * n_attack;
        LayerBuilder b(p.n_qubits);
        b.add(Gate::h(0));
        b.add(Gate::rz(0, prep_angle));
        b.fence();
        for (int d = 0; d < depth; ++d) {
            b.add(Gate::cx(0, 1));
            for (int k = 0; k < n_attack; ++k) b.add(Gate::cx(2 + 2 * k, 3 + 2 * k));
            b.fence();
        }
        b.add(Gate::measure(0));
        b.add(Gate::measure(1));
        p.layers = std::move(b).take();
        p.validate();
        return p;
    };

    Program ub1 = build(0);
    ub1.id = "ub1";
    Program ub2 = build(static_cast<int>(attack_links.size()));
    ub2.id = "ub2";
    return {ub1, ub2};
}

MappedProgram map_microbenchmark(const Program& p, const topology::Link& victim,
                                 const std::vector<topology::Link>& attack_links) {
    std::vector<int> phys{victim.a, victim.b};
    for (const auto& l : attack_links) {
        phys.push_back(l.a);
        phys.push_back(l.b);
    }
    if (static_cast<int>(phys.size()) < p.n_qubits)
        throw CircuitError("not enough links to place micro-benchmark");
    phys.resize(p.n_qubits);
    MappedProgram mp;
    mp.program = p;
    mp.region.qubits = phys;
    mp.region.owner = p.id;
    mp.qubit_map = phys;
    return mp;
}

Program gen_zkta(int n_qubits, int depth, int repeat_cycles) {
    if (n_qubits < 4) throw CircuitError("attack circuit needs at least 4 qubits");
    if (depth < 1 || repeat_cycles < 1) throw CircuitError("attack depth must be >= 1");
    Program p;
    p.id = "zkta-" + std::to_string(n_qubits) + "x" + std::to_string(depth);
    p.n_qubits = n_qubits;
    LayerBuilder b(n_qubits);
    for (int cycle = 0; cycle < depth; ++cycle) {
        // even cycles: (0,1)(2,3)...; odd: (1,2)(3,4)...; repeat_cycles > 1
        // holds each pattern for that many consecutive cycles
        int offset = (cycle / repeat_cycles) % 2;
        for (int q = offset; q + 1 < n_qubits; q += 2) b.add(Gate::cx(q, q + 1));
        b.fence();
    }
    for (int q = 0; q < n_qubits; ++q) b.add(Gate::measure(q));
    p.layers = std::move(b).take();
    p.validate();
    return p;
}

std::pair<Program, Graph> disguise_as_qaoa(const Program& zkta, double gamma, double beta) {
    // Collect the CX layers; anything else except trailing measures makes
    // the program non-disguisable.
    std::vector<std::vector<Gate>> cx_layers;
    for (const auto& layer : zkta.layers) {
        std::vector<Gate> cxs;
        for (const auto& g : layer) {
            if (g.kind == GateKind::CX)
                cxs.push_back(g);
            else if (g.kind == GateKind::Measure || g.kind == GateKind::Barrier)
                continue;
            else
                throw DisguiseError("not disguisable: program contains non-CX gates");
        }
        if (!cxs.empty()) cx_layers.push_back(std::move(cxs));
    }

    // Pair each CX with an identical CX in the following layer.
    if (cx_layers.size() % 2 != 0)
        throw DisguiseError("not disguisable: odd number of CX layers");
    std::set<std::pair<int, int>> edge_set;
    for (size_t t = 0; t + 1 < cx_layers.size(); t += 2) {
        auto key = [](const Gate& g) { return std::make_pair(g.q0, g.q1); };
        std::multiset<std::pair<int, int>> first, second;
        for (const auto& g : cx_layers[t]) first.insert(key(g));
        for (const auto& g : cx_layers[t + 1]) second.insert(key(g));
        if (first != second)
            throw DisguiseError("not disguisable: CX layers cannot be paired into RZZ blocks");
        for (const auto& e : first) edge_set.insert(e);
    }

    Graph g;
    g.n_nodes = zkta.n_qubits;
    for (const auto& [a, b] : edge_set) g.edges.emplace_back(a, b, 1.0);

    // Rebuild: the paired CX layers stay put, with an RZ layer between the
    // two halves of each block, then one mixer pass and measurement.
    Program p;
    p.id = zkta.id + "-qaoa";
    p.n_qubits = zkta.n_qubits;
    for (size_t t = 0; t + 1 < cx_layers.size(); t += 2) {
        p.layers.push_back(cx_layers[t]);
        Layer rz_layer;
        for (const auto& gcx : cx_layers[t]) rz_layer.push_back(Gate::rz(gcx.q1, 2.0 * gamma));
        p.layers.push_back(rz_layer);
        p.layers.push_back(cx_layers[t + 1]);
    }
    if (!cx_layers.empty()) {
        Layer h1, rz, h2, meas;
        for (int q = 0; q < p.n_qubits; ++q) {
            h1.push_back(Gate::h(q));
            rz.push_back(Gate::rz(q, 2.0 * beta));
            h2.push_back(Gate::h(q));
            meas.push_back(Gate::measure(q));
        }
        p.layers.push_back(h1);
        p.layers.push_back(rz);
        p.layers.push_back(h2);
        p.layers.push_back(meas);
    }
    p.validate();
    return {p, g};
}

}  // namespace qontexts::circuit
