#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qontexts/circuit.hpp"

namespace qontexts::circuit {

/// Simple undirected weighted graph for MaxCut instances.
struct Graph {
    int n_nodes = 0;
    std::vector<std::tuple<int, int, double>> edges;  // (a, b, weight)

    void validate() const;
};

Graph graph_from_json_file(const std::string& path);
void graph_to_json_file(const Graph& g, const std::string& path);

/// Bernstein-Vazirani circuit over |secret|+1 qubits; the data qubits
/// are measured and the ideal output equals `secret` (qubit i carries
/// character i of the string).
Program gen_bv(const std::string& secret);

/// H followed by a CX chain; all qubits measured.
Program gen_ghz(int n);

/// MaxCut QAOA: initial H layer, then per layer an RZZ block
/// (CX, RZ(2*gamma*w), CX) per edge and an H-RZ(2*beta)-H mixer per node.
Program gen_qaoa_maxcut(const Graph& g, int p, const std::vector<double>& gamma,
                        const std::vector<double>& beta);

/// Crosstalk characterization pair. ub1 prepares one qubit of the victim
/// link (H then RZ(prep_angle)) and runs `depth` CX on it; ub2 adds a
/// concurrent CX on every attack link in each CX layer. Both measure only
/// the victim qubits; ub2 spans 2 + 2*|attack_links| logical qubits, laid
/// out victim first then attack links in order. The links must be
/// pairwise disjoint.
std::pair<Program, Program> gen_microbenchmarks(const topology::Link& victim,
                                                const std::vector<topology::Link>& attack_links,
                                                int depth, double prep_angle = 0.7);

/// Builds the region/map placing a micro-benchmark onto explicit device
/// links (victim link first).
MappedProgram map_microbenchmark(const Program& p, const topology::Link& victim,
                                 const std::vector<topology::Link>& attack_links);

/// Attack circuit: alternates two maximal disjoint CX matchings on the
/// qubit line (even-offset pairs, then odd-offset pairs) for `depth`
/// cycles, maximizing concurrent CX. `repeat_cycles` > 1 repeats each
/// cycle back to back, which makes the circuit expressible as RZZ blocks.
Program gen_zkta(int n_qubits, int depth, int repeat_cycles = 1);

struct DisguiseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Rewrites a CX-only program into QAOA shape by pairing consecutive
/// identical CX(a,b) into RZZ blocks and appending a mixer layer.
/// Returns the program and the MaxCut graph whose edges are the distinct
/// CX pairs. Throws DisguiseError when the CX structure cannot be paired.
std::pair<Program, Graph> disguise_as_qaoa(const Program& zkta, double gamma = 0.5,
                                           double beta = 0.4);

}  // namespace qontexts::circuit
