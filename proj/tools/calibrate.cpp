// Fits the shipped noise fixture: bisects the scenario crosstalk
// coefficients until the micro-benchmark relative-fidelity targets are
// met, then writes fixtures/calibration.json. Run manually from the
// repository root when the model constants change.
#include <iostream>
#include <vector>

#include "qontexts/generators.hpp"
#include "qontexts/noise.hpp"
#include "qontexts/rng.hpp"
#include "qontexts/simulator.hpp"
#include "qontexts/topology.hpp"

using namespace qontexts;

namespace {

double scenario_rf(const sim::CalibrationFixture& fix, int n_links, double chi, long trials,
                   uint64_t seed) {
    sim::NoiseProfile profile;
    profile.eps1 = fix.params.eps1;
    profile.eps2 = fix.params.eps2;
    profile.eps_ro = fix.params.eps_ro;
    std::vector<topology::Link> attack(fix.attack_links.begin(), fix.attack_links.begin() + n_links);
    for (const auto& l : attack) profile.set_crosstalk(fix.victim_link, l, chi);

    auto [ub1, ub2] = circuit::gen_microbenchmarks(fix.victim_link, attack, fix.depth);
    auto m1 = circuit::map_microbenchmark(ub1, fix.victim_link, {});
    auto m2 = circuit::map_microbenchmark(ub2, fix.victim_link, attack);
    auto ideal = sim::simulate_ideal(ub1);
    auto iso = sim::sample_noisy({m1}, profile, trials, seed)[0];
    auto shared = sim::sample_noisy({m2}, profile, trials, rng::mix(seed, 7))[0];
    return sim::relative_fidelity(iso, shared, ideal);
}

double fit_chi(const sim::CalibrationFixture& fix, int n_links, double target, long trials) {
    double lo = 0.0, hi = 1.5;
    for (int it = 0; it < 28; ++it) {
        double mid = 0.5 * (lo + hi);
        double rf = scenario_rf(fix, n_links, mid, trials, 0x5ca1ab1eULL + it);
        if (rf > target)
            lo = mid;  // not enough crosstalk yet
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

int main(int argc, char** argv) {
    long trials = argc > 1 ? std::atol(argv[1]) : 60000;

    sim::CalibrationFixture fix;
    fix.params.eps1 = 0.001;
    fix.params.eps2 = 0.008;
    fix.params.eps_ro = 0.01;
    fix.params.p_xt = 0.587;
    fix.params.hop_decay = 0.8;
    fix.params.chi_base = 0.015;
    fix.params.chi_floor = 0.006;
    fix.params.tail_prob = 0.06;
    fix.params.tail_scale = 1.2;
    fix.depth = 8;
    fix.victim_link = topology::Link(18, 21);
    fix.attack_links = {topology::Link(23, 24), topology::Link(22, 25), topology::Link(13, 14)};

    fix.chi_pair = fit_chi(fix, 1, fix.rf_pair, trials);
    fix.chi_triple = fit_chi(fix, 2, fix.rf_triple, trials);
    fix.chi_quad = fit_chi(fix, 3, fix.rf_quad, trials);

    std::cout << "chi_pair   = " << fix.chi_pair << "\n";
    std::cout << "chi_triple = " << fix.chi_triple << "\n";
    std::cout << "chi_quad   = " << fix.chi_quad << "\n";

    for (int k = 1; k <= 3; ++k) {
        double chi = k == 1 ? fix.chi_pair : k == 2 ? fix.chi_triple : fix.chi_quad;
        double rf = scenario_rf(fix, k, chi, trials, 0xfeedULL + k);
        std::cout << "check RF(" << k + 1 << " links) = " << rf << "\n";
    }

    auto dev = topology::make_device("hanoi27");
    auto profile = sim::gen_noise_profile(dev, 1, fix.params);
    size_t total = dev.links.size() * (dev.links.size() - 1) / 2;
    std::cout << "chi-active fraction on hanoi27 (seed 1): " << profile.active_fraction(total)
              << "\n";

    std::string out = topology::fixture_dir() + "/calibration.json";
    sim::save_calibration(fix, out);
    std::cout << "wrote " << out << "\n";
    return 0;
}
