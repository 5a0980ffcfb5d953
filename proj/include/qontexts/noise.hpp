#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>

#include "qontexts/topology.hpp"

namespace qontexts::sim {

using topology::Device;
using topology::Link;

/// Canonical unordered pair of links (smaller link first).
struct LinkPair {
    Link first;
    Link second;

    LinkPair() = default;
    LinkPair(const Link& x, const Link& y) {
        if (y < x) {
            first = y;
            second = x;
        } else {
            first = x;
            second = y;
        }
    }

    bool operator<(const LinkPair& o) const {
        if (first < o.first) return true;
        if (o.first < first) return false;
        return second < o.second;
    }
    bool operator==(const LinkPair& o) const { return first == o.first && second == o.second; }
};

/// Synthetic device error model: depolarizing rates for gates, readout
/// flip probability, and a symmetric crosstalk coefficient per link pair.
struct NoiseProfile {
    double eps1 = 0.0;    // per-1q-gate depolarizing probability
    double eps2 = 0.0;    // per-CX depolarizing probability
    double eps_ro = 0.0;  // per-qubit readout flip probability
    std::map<LinkPair, double> chi;
    uint64_t seed = 0;

    double crosstalk(const Link& a, const Link& b) const {
        auto it = chi.find(LinkPair(a, b));
        return it == chi.end() ? 0.0 : it->second;
    }

    void set_crosstalk(const Link& a, const Link& b, double value) {
        chi[LinkPair(a, b)] = value;
    }

    /// Fraction of stored link pairs with chi > 0 relative to `total_pairs`.
    double active_fraction(size_t total_pairs) const;
};

/// Parameters of the random crosstalk generator.
struct NoiseParams {
    double eps1 = 0.001;
    double eps2 = 0.008;
    double eps_ro = 0.01;
    double p_xt = 0.587;      // fraction of link pairs with chi > 0
    double hop_decay = 0.8;   // decay rate per hop beyond neighbors
    double chi_base = 0.02;   // local crosstalk scale
    double chi_floor = 0.006; // minimum coefficient for active pairs
    double tail_prob = 0.05;  // chance an active pair is a heavy-tail pair
    double tail_scale = 1.0;  // heavy-tail magnitude (hop-independent)
};

/// Draws a crosstalk profile for the device. Each unordered link pair is
/// active with probability p_xt; active pairs get a coefficient whose
/// mean decays with hop distance, except heavy-tail pairs which stay
/// large at any distance. Deterministic for a fixed seed.
NoiseProfile gen_noise_profile(const Device& dev, uint64_t seed, const NoiseParams& params);

/// Per-link weight for error-aware region allocation: the link's CX error
/// rate plus everything it can pick up from crosstalk.
std::map<Link, double> link_error_weights(const Device& dev, const NoiseProfile& profile);

std::string noise_profile_to_json(const NoiseProfile& p);
NoiseProfile noise_profile_from_json(const std::string& text);

/// Calibrated model constants shipped with the toolkit plus the link
/// scenarios used to pin them down (one victim link, three attack links,
/// and the per-scenario crosstalk coefficients).
struct CalibrationFixture {
    NoiseParams params;
    int depth = 8;
    Link victim_link;
    std::vector<Link> attack_links;  // attack links, used cumulatively
    double chi_pair = 0.0;           // coefficient when 1 attack link runs
    double chi_triple = 0.0;         // per-link coefficient for 2 attack links
    double chi_quad = 0.0;           // per-link coefficient for 3 attack links
    double rf_pair = 0.89;
    double rf_triple = 0.75;
    double rf_quad = 0.64;
};

CalibrationFixture load_calibration(const std::string& path);
CalibrationFixture load_default_calibration();
void save_calibration(const CalibrationFixture& f, const std::string& path);

/// Profile containing only the calibration scenario's crosstalk entries
/// for the given number of attack links (1, 2 or 3).
NoiseProfile scenario_profile(const CalibrationFixture& f, int n_attack_links);

}  // namespace qontexts::sim
