#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "qontexts/generators.hpp"
#include "qontexts/qasm.hpp"

using namespace qontexts::circuit;
using qontexts::topology::Link;

namespace {

// Layer disjointness holds for every generator output and parsed program.
void check_layering(const Program& p) {
    for (const auto& layer : p.layers) {
        std::set<int> used;
        for (const auto& g : layer) {
            if (g.kind == GateKind::Barrier) continue;
            CHECK(used.insert(g.q0).second);
            if (g.kind == GateKind::CX) CHECK(used.insert(g.q1).second);
        }
    }
}

int popcount(const std::string& bits) {
    int n = 0;
    for (char c : bits) n += c == '1';
    return n;
}

Graph triangle() {
    Graph g;
    g.n_nodes = 3;
    g.edges = {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}};
    return g;
}

}  // namespace

TEST_CASE("qasm parsing basics") {
    auto p = parse_qasm("OPENQASM 2.0;\nqreg q[1];\ncreg c[1];\nh q[0];\nmeasure q[0] -> c[0];\n");
    CHECK(p.n_qubits == 1);
    int gate_layers = 0;
    for (const auto& layer : p.layers) {
        bool compute = false;
        for (const auto& g : layer) compute |= g.kind != GateKind::Measure;
        gate_layers += compute;
    }
    CHECK(gate_layers == 1);
    CHECK(p.measured_qubits() == std::vector<int>{0});
}

TEST_CASE("qasm as-soon-as-possible layering") {
    auto p = parse_qasm("qreg q[4]; cx q[0],q[1]; cx q[2],q[3];");
    REQUIRE(p.layers.size() == 1);
    CHECK(p.layers[0].size() == 2);

    auto chained = parse_qasm("qreg q[3]; cx q[0],q[1]; cx q[1],q[2];");
    CHECK(chained.layers.size() == 2);

    auto fenced = parse_qasm("qreg q[4]; cx q[0],q[1]; barrier q; cx q[2],q[3];");
    CHECK(fenced.layers.size() == 2);
}

TEST_CASE("qasm errors carry position and gate names") {
    try {
        parse_qasm("qreg q[2];\nswap q[0],q[1];");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
        CHECK(std::string(e.what()).find("swap") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_qasm("qreg q[2]; h q[5];"), ParseError);
    CHECK_THROWS_AS(parse_qasm("qreg q[2]; cx q[0] q[1];"), ParseError);
}

TEST_CASE("qasm round trips") {
    CHECK(emit_qasm(Program{}).find("OPENQASM") == 0);  // header-only for empty program

    for (const Program& p : {gen_bv("101"), gen_ghz(9), gen_bv("11101011"),
                             gen_qaoa_maxcut(triangle(), 1, {0.3}, {0.7}), gen_zkta(6, 5)}) {
        auto round = parse_qasm(emit_qasm(p));
        CHECK(structurally_equal(p, round));
    }
}

TEST_CASE("bv generator") {
    auto p = gen_bv("11101011");
    CHECK(p.n_qubits == 9);
    CHECK(p.cx_count() == popcount("11101011"));
    check_layering(p);

    CHECK(gen_bv("0000").cx_count() == 0);

    auto table_row = gen_bv("1101001101");  // 11 qubits, 6 ones
    CHECK(table_row.n_qubits == 11);
    CHECK(table_row.cx_count() == 6);

    CHECK_THROWS_AS(gen_bv(""), CircuitError);
}

TEST_CASE("ghz generator") {
    auto p = gen_ghz(9);
    CHECK(p.cx_count() == 8);
    check_layering(p);

    auto bell = gen_ghz(2);
    CHECK(bell.n_qubits == 2);
    CHECK(bell.cx_count() == 1);

    CHECK_THROWS_AS(gen_ghz(1), CircuitError);
}

TEST_CASE("qaoa generator") {
    auto p = gen_qaoa_maxcut(triangle(), 1, {0.5}, {0.3});
    CHECK(p.cx_count() == 6);  // 2 CX per edge, 3 edges
    check_layering(p);

    CHECK_THROWS_AS(gen_qaoa_maxcut(triangle(), 2, {0.5}, {0.3}), CircuitError);
    Graph empty_graph;
    empty_graph.n_nodes = 3;
    CHECK_THROWS_AS(gen_qaoa_maxcut(empty_graph, 1, {0.5}, {0.3}), CircuitError);
}

TEST_CASE("micro-benchmark pair") {
    Link victim(0, 1);

    auto [ub1, ub2] = gen_microbenchmarks(victim, {}, 4);
    CHECK(structurally_equal(ub1, ub2));  // no attack links: identical shapes

    auto [b1, b2] = gen_microbenchmarks(victim, {Link(2, 3)}, 4);
    CHECK(b2.n_qubits == 4);
    CHECK(b2.cx_count() == 8);
    check_layering(b2);
    CHECK(b1.measured_qubits() == b2.measured_qubits());

    auto [c1, c2] =
        gen_microbenchmarks(victim, {Link(2, 3), Link(4, 5), Link(6, 7)}, 4);
    (void)c1;
    int cx_layers = 0;
    for (const auto& layer : c2.layers) {
        int cx = 0;
        for (const auto& g : layer) cx += g.kind == GateKind::CX;
        if (cx) {
            CHECK(cx == 4);  // victim + 3 attack links per CX layer
            ++cx_layers;
        }
    }
    CHECK(cx_layers == 4);

    CHECK_THROWS_AS(gen_microbenchmarks(victim, {Link(1, 2)}, 4), CircuitError);
}

TEST_CASE("attack circuit matchings") {
    auto p = gen_zkta(4, 2);
    std::vector<std::vector<std::pair<int, int>>> cx_layers;
    for (const auto& layer : p.layers) {
        std::vector<std::pair<int, int>> cxs;
        for (const auto& g : layer)
            if (g.kind == GateKind::CX) cxs.emplace_back(g.q0, g.q1);
        if (!cxs.empty()) cx_layers.push_back(cxs);
    }
    REQUIRE(cx_layers.size() == 2);
    CHECK(cx_layers[0] == std::vector<std::pair<int, int>>{{0, 1}, {2, 3}});
    CHECK(cx_layers[1] == std::vector<std::pair<int, int>>{{1, 2}});

    auto eight = gen_zkta(8, 4);
    int c = 0;
    for (const auto& layer : eight.layers) {
        int cx = 0;
        for (const auto& g : layer) cx += g.kind == GateKind::CX;
        if (cx && c % 2 == 0) CHECK(cx == 4);  // even cycles: floor(8/2) concurrent CX
        if (cx) ++c;
    }
    CHECK(c == 4);
    check_layering(eight);

    CHECK_THROWS_AS(gen_zkta(3, 2), CircuitError);
}

TEST_CASE("disguise as qaoa") {
    // repeated identical CX pair becomes an RZZ block over edge (0,1)
    Program simple;
    simple.id = "pair";
    simple.n_qubits = 2;
    simple.layers = {{Gate::cx(0, 1)}, {Gate::cx(0, 1)}};
    auto [prog, graph] = disguise_as_qaoa(simple);
    REQUIRE(graph.edges.size() == 1);
    CHECK(std::get<0>(graph.edges[0]) == 0);
    CHECK(std::get<1>(graph.edges[0]) == 1);
    check_layering(prog);

    // empty program: empty graph
    auto [eprog, egraph] = disguise_as_qaoa(Program{});
    CHECK(egraph.edges.empty());
    CHECK(eprog.layers.empty());

    // doubled-cycle attack circuit with depth 2 holds one pattern: 2 edges
    auto doubled = gen_zkta(4, 2, 2);
    auto [dprog, dgraph] = disguise_as_qaoa(doubled);
    CHECK(dgraph.edges.size() == 2);

    // stripped of RZ and mixer gates the CX layer structure is unchanged
    auto deeper = gen_zkta(6, 4, 2);
    auto [qprog, qgraph] = disguise_as_qaoa(deeper);
    (void)qgraph;
    std::vector<std::multiset<std::pair<int, int>>> in_cx, out_cx;
    auto collect = [](const Program& p, std::vector<std::multiset<std::pair<int, int>>>& out) {
        for (const auto& layer : p.layers) {
            std::multiset<std::pair<int, int>> cxs;
            for (const auto& g : layer)
                if (g.kind == GateKind::CX) cxs.insert({g.q0, g.q1});
            if (!cxs.empty()) out.push_back(cxs);
        }
    };
    collect(deeper, in_cx);
    collect(qprog, out_cx);
    CHECK(in_cx == out_cx);

    // alternating single cycles cannot be paired
    CHECK_THROWS_AS(disguise_as_qaoa(gen_zkta(4, 2, 1)), DisguiseError);
    // non-CX gates are not disguisable
    CHECK_THROWS_AS(disguise_as_qaoa(gen_ghz(4)), DisguiseError);
}

TEST_CASE("mapped program validation") {
    auto p = gen_ghz(3);
    qontexts::topology::Region region;
    region.qubits = {4, 5, 6};
    auto mp = map_onto_region(p, region);
    CHECK(mp.qubit_map == std::vector<int>{4, 5, 6});

    qontexts::topology::Region small;
    small.qubits = {1, 2};
    CHECK_THROWS_AS(map_onto_region(p, small), CircuitError);
}
