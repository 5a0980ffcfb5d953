#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "qontexts/detection.hpp"
#include "qontexts/generators.hpp"
#include "qontexts/rng.hpp"
#include "qontexts/simulator.hpp"

using namespace qontexts;
using namespace qontexts::sim;
using qontexts::circuit::Gate;
using qontexts::circuit::Program;
using qontexts::topology::Link;

namespace {

circuit::Graph triangle() {
    circuit::Graph g;
    g.n_nodes = 3;
    g.edges = {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}};
    return g;
}

double total_probability(const Distribution& d) {
    double p = 0.0;
    for (const auto& [bits, c] : d.counts) p += c / d.trials;
    return p;
}

// Two-sample Kolmogorov-Smirnov distance over the sorted outcome union.
bool same_distribution_ks(const Distribution& a, const Distribution& b, double alpha_crit) {
    std::set<std::string> keys;
    for (const auto& [k, v] : a.counts) keys.insert(k);
    for (const auto& [k, v] : b.counts) keys.insert(k);
    double fa = 0.0, fb = 0.0, d = 0.0;
    for (const auto& k : keys) {
        fa += a.probability(k);
        fb += b.probability(k);
        d = std::max(d, std::abs(fa - fb));
    }
    double n = a.trials, m = b.trials;
    return d <= alpha_crit * std::sqrt((n + m) / (n * m));
}

circuit::MappedProgram on_qubits(const Program& p, std::vector<int> qubits) {
    topology::Region r;
    r.qubits = std::move(qubits);
    return circuit::map_onto_region(p, r);
}

}  // namespace

TEST_CASE("ideal simulation of deterministic and symmetric circuits") {
    auto bv = simulate_ideal(circuit::gen_bv("101"));
    CHECK(bv.probability("101") == doctest::Approx(1.0).epsilon(1e-12));

    auto ghz = simulate_ideal(circuit::gen_ghz(3));
    CHECK(ghz.probability("000") == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(ghz.probability("111") == doctest::Approx(0.5).epsilon(1e-12));

    auto qaoa = simulate_ideal(circuit::gen_qaoa_maxcut(triangle(), 1, {0.0}, {0.0}));
    CHECK(qaoa.counts.size() == 8);
    for (const auto& [bits, c] : qaoa.counts)
        CHECK(c / qaoa.trials == doctest::Approx(0.125).epsilon(1e-12));
}

TEST_CASE("ideal simulation preserves normalization") {
    for (const Program& p :
         {circuit::gen_ghz(6), circuit::gen_bv("110101"),
          circuit::gen_qaoa_maxcut(triangle(), 2, {0.37, 1.1}, {0.21, 0.5}),
          circuit::gen_zkta(6, 4)}) {
        auto d = simulate_ideal(p);
        CHECK(std::abs(total_probability(d) - 1.0) < 1e-12);
    }
}

TEST_CASE("qubit cap enforced") {
    Program wide;
    wide.n_qubits = 25;
    CHECK_THROWS_AS(simulate_ideal(wide), SimulatorError);
}

TEST_CASE("noiseless sampling converges to the ideal distribution") {
    NoiseProfile zero;
    auto prog = circuit::gen_ghz(4);
    auto mapped = on_qubits(prog, {0, 1, 2, 3});
    auto sampled = sample_noisy({mapped}, zero, 8000, 11)[0];
    auto ideal = simulate_ideal(prog);
    double tvd = 1.0 - detect::fidelity(ideal, sampled);
    CHECK(tvd < 0.02);
}

TEST_CASE("sampling is deterministic for a fixed seed") {
    auto calib = load_default_calibration();
    auto profile = scenario_profile(calib, 1);
    Link victim = calib.victim_link;
    auto [ub1, ub2] = circuit::gen_microbenchmarks(victim, {calib.attack_links[0]}, calib.depth);
    (void)ub1;
    auto mapped = circuit::map_microbenchmark(ub2, victim, {calib.attack_links[0]});

    auto a = sample_noisy({mapped}, profile, 3000, 42)[0];
    auto b = sample_noisy({mapped}, profile, 3000, 42)[0];
    CHECK(a.counts == b.counts);
    auto c = sample_noisy({mapped}, profile, 3000, 43)[0];
    CHECK(a.counts != c.counts);
}

TEST_CASE("calibrated crosstalk scenarios reproduce the fixture targets") {
    auto calib = load_default_calibration();
    for (int k = 1; k <= 3; ++k) {
        auto profile = scenario_profile(calib, k);
        std::vector<Link> attack(calib.attack_links.begin(), calib.attack_links.begin() + k);
        auto [ub1, ub2] = circuit::gen_microbenchmarks(calib.victim_link, attack, calib.depth);
        auto m1 = circuit::map_microbenchmark(ub1, calib.victim_link, {});
        auto m2 = circuit::map_microbenchmark(ub2, calib.victim_link, attack);
        auto ideal = simulate_ideal(ub1);

        double sum = 0.0;
        const int seeds = 6;
        for (int s = 0; s < seeds; ++s) {
            auto iso = sample_noisy({m1}, profile, 20000, rng::mix(100, s))[0];
            auto shared = sample_noisy({m2}, profile, 20000, rng::mix(200, s))[0];
            sum += relative_fidelity(iso, shared, ideal);
        }
        double rf = sum / seeds;
        double target = k == 1 ? calib.rf_pair : k == 2 ? calib.rf_triple : calib.rf_quad;
        CHECK(std::abs(rf - target) < 0.03);
    }
}

TEST_CASE("mean relative fidelity never improves with more concurrent links") {
    auto calib = load_default_calibration();
    std::vector<double> mean_rf;
    for (int k = 1; k <= 3; ++k) {
        auto profile = scenario_profile(calib, k);
        std::vector<Link> attack(calib.attack_links.begin(), calib.attack_links.begin() + k);
        auto [ub1, ub2] = circuit::gen_microbenchmarks(calib.victim_link, attack, calib.depth);
        auto m1 = circuit::map_microbenchmark(ub1, calib.victim_link, {});
        auto m2 = circuit::map_microbenchmark(ub2, calib.victim_link, attack);
        auto ideal = simulate_ideal(ub1);
        double sum = 0.0;
        const int seeds = 20;  // paired seeds across k
        for (int s = 0; s < seeds; ++s) {
            auto iso = sample_noisy({m1}, profile, 4000, rng::mix(7, s))[0];
            auto shared = sample_noisy({m2}, profile, 4000, rng::mix(9, s))[0];
            sum += relative_fidelity(iso, shared, ideal);
        }
        mean_rf.push_back(sum / seeds);
    }
    CHECK(mean_rf[0] >= mean_rf[1]);
    CHECK(mean_rf[1] >= mean_rf[2]);
}

TEST_CASE("zero crosstalk makes co-scheduling equal to running alone") {
    NoiseProfile profile;
    profile.eps1 = 0.002;
    profile.eps2 = 0.012;
    profile.eps_ro = 0.02;  // real gate noise, no crosstalk

    auto ghz = circuit::gen_ghz(5);
    auto bv = circuit::gen_bv("1011");
    auto together = sample_noisy({on_qubits(ghz, {0, 1, 2, 3, 4}), on_qubits(bv, {5, 6, 7, 8, 9})},
                                 profile, 6000, 77);
    auto alone = sample_noisy({on_qubits(ghz, {0, 1, 2, 3, 4})}, profile, 6000, 78);

    CHECK(same_distribution_ks(together[0], alone[0], 1.628));  // alpha = 0.01
}

TEST_CASE("strong concurrent crosstalk degrades the victim") {
    NoiseProfile profile;
    profile.eps2 = 0.005;
    profile.set_crosstalk(Link(0, 1), Link(2, 3), 0.8);

    auto [ub1, ub2] = circuit::gen_microbenchmarks(Link(0, 1), {Link(2, 3)}, 6);
    auto m1 = circuit::map_microbenchmark(ub1, Link(0, 1), {});
    auto m2 = circuit::map_microbenchmark(ub2, Link(0, 1), {Link(2, 3)});
    auto ideal = simulate_ideal(ub1);
    auto iso = sample_noisy({m1}, profile, 8000, 5)[0];
    auto shared = sample_noisy({m2}, profile, 8000, 6)[0];
    CHECK(relative_fidelity(iso, shared, ideal) < 0.6);
}

TEST_CASE("sampling rejects overlapping regions") {
    auto ghz = circuit::gen_ghz(3);
    NoiseProfile zero;
    CHECK_THROWS_AS(
        sample_noisy({on_qubits(ghz, {0, 1, 2}), on_qubits(ghz, {2, 3, 4})}, zero, 10, 1),
        SimulatorError);
}

TEST_CASE("relative fidelity basics") {
    Distribution ideal;
    ideal.add("00", 100);
    Distribution same = ideal;
    CHECK(relative_fidelity(same, same, ideal) == doctest::Approx(1.0));

    // point-mass ideal vs uniform over 4 outcomes including the point
    Distribution uniform;
    for (const std::string& k : {"00", "01", "10", "11"}) uniform.add(k, 25);
    CHECK(relative_fidelity(ideal, uniform, ideal) == doctest::Approx(0.25));

    Distribution far;
    far.add("11", 100);
    CHECK_THROWS_AS(relative_fidelity(far, far, ideal), SimulatorError);  // zero iso fidelity
}

TEST_CASE("noise profile generator") {
    auto dev = topology::make_device("hanoi27");
    size_t total = dev.links.size() * (dev.links.size() - 1) / 2;

    NoiseParams params;  // defaults
    SUBCASE("no crosstalk at p_xt = 0") {
        params.p_xt = 0.0;
        auto p = gen_noise_profile(dev, 3, params);
        CHECK(p.chi.empty());
    }
    SUBCASE("fast decay restricts crosstalk to neighboring pairs") {
        params.p_xt = 1.0;
        params.tail_prob = 0.0;
        params.hop_decay = 40.0;  // decay rate per hop: d >= 2 vanishes
        params.chi_floor = 0.0;
        auto p = gen_noise_profile(dev, 3, params);
        for (const auto& [pair, value] : p.chi) {
            int d = topology::hop_distance(dev, pair.first, pair.second);
            if (d > 1) CHECK(value < 1e-10);
        }
    }
    SUBCASE("active fraction tracks p_xt") {
        auto p = gen_noise_profile(dev, 3, params);
        CHECK(std::abs(p.active_fraction(total) - params.p_xt) < 0.05);
    }
    SUBCASE("deterministic per seed") {
        auto a = gen_noise_profile(dev, 9, params);
        auto b = gen_noise_profile(dev, 9, params);
        CHECK(a.chi == b.chi);
    }
    SUBCASE("chi mean decays with hop distance, heavy tail persists") {
        params.tail_prob = 0.0;
        auto p = gen_noise_profile(dev, 5, params);
        std::map<int, std::pair<double, int>> by_hop;
        for (const auto& [pair, value] : p.chi) {
            auto& agg = by_hop[topology::hop_distance(dev, pair.first, pair.second)];
            agg.first += value;
            agg.second += 1;
        }
        double near = by_hop[1].first / by_hop[1].second;
        double far = by_hop[5].first / by_hop[5].second;
        CHECK(near > far);

        params.tail_prob = 1.0;  // every active pair becomes a tail pair
        auto tails = gen_noise_profile(dev, 5, params);
        double far_tail = 0.0;
        int far_n = 0;
        for (const auto& [pair, value] : tails.chi) {
            if (topology::hop_distance(dev, pair.first, pair.second) >= 5) {
                far_tail += value;
                ++far_n;
            }
        }
        REQUIRE(far_n > 0);
        CHECK(far_tail / far_n > 0.5);  // distant pairs keep large coefficients
    }
}

TEST_CASE("noise profile serialization round trip") {
    auto dev = topology::make_device("hanoi27");
    auto p = gen_noise_profile(dev, 21, NoiseParams{});
    auto round = noise_profile_from_json(noise_profile_to_json(p));
    CHECK(round.eps1 == p.eps1);
    CHECK(round.eps2 == p.eps2);
    CHECK(round.eps_ro == p.eps_ro);
    CHECK(round.chi == p.chi);
}
