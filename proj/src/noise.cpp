#include "qontexts/noise.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qontexts/rng.hpp"

namespace qontexts::sim {

using nlohmann::json;

double NoiseProfile::active_fraction(size_t total_pairs) const {
    if (total_pairs == 0) return 0.0;
    size_t active = 0;
    for (const auto& [pair, value] : chi) {
        (void)pair;
        if (value > 0.0) ++active;
    }
    return static_cast<double>(active) / static_cast<double>(total_pairs);
}

NoiseProfile gen_noise_profile(const Device& dev, uint64_t seed, const NoiseParams& params) {
    NoiseProfile profile;
    profile.eps1 = params.eps1;
    profile.eps2 = params.eps2;
    profile.eps_ro = params.eps_ro;
    profile.seed = seed;

    rng::Stream stream(rng::mix(seed, 0x78746c6bULL));  // one stream, pairs in canonical order
    const auto& links = dev.links;
    for (size_t i = 0; i < links.size(); ++i) {
        for (size_t j = i + 1; j < links.size(); ++j) {
            // fixed draw count per pair keeps the stream aligned
            double u_active = stream.uniform();
            double jitter = stream.normal();
            double u_tail = stream.uniform();
            double tail_mag = stream.normal();
            if (u_active >= params.p_xt) continue;
            double value;
            if (u_tail < params.tail_prob) {
                // heavy tail: large coefficient independent of distance
                value = params.tail_scale * (0.75 + 0.5 * std::abs(tail_mag));
            } else {
                int d = hop_distance(dev, links[i], links[j]);
                double decay = std::exp(-params.hop_decay * std::max(0, d - 1));
                value = params.chi_base * decay * std::exp(0.5 * jitter);
            }
            value = std::max(value, params.chi_floor);
            profile.chi.emplace(LinkPair(links[i], links[j]), value);
        }
    }
    return profile;
}

std::map<Link, double> link_error_weights(const Device& dev, const NoiseProfile& profile) {
    std::map<Link, double> weights;
    for (const auto& l : dev.links) weights[l] = profile.eps2;
    for (const auto& [pair, value] : profile.chi) {
        weights[pair.first] += value;
        weights[pair.second] += value;
    }
    return weights;
}

namespace {

json link_to_json(const Link& l) { return json::array({l.a, l.b}); }

Link link_from_json(const json& j) { return Link(j.at(0).get<int>(), j.at(1).get<int>()); }

}  // namespace

std::string noise_profile_to_json(const NoiseProfile& p) {
    json j;
    j["eps1"] = p.eps1;
    j["eps2"] = p.eps2;
    j["eps_ro"] = p.eps_ro;
    j["seed"] = p.seed;
    j["chi"] = json::array();
    for (const auto& [pair, value] : p.chi)
        j["chi"].push_back({link_to_json(pair.first), link_to_json(pair.second), value});
    return j.dump(1);
}

NoiseProfile noise_profile_from_json(const std::string& text) {
    json j = json::parse(text);
    NoiseProfile p;
    p.eps1 = j.at("eps1").get<double>();
    p.eps2 = j.at("eps2").get<double>();
    p.eps_ro = j.at("eps_ro").get<double>();
    p.seed = j.value("seed", 0ULL);
    for (const auto& entry : j.at("chi"))
        p.chi.emplace(LinkPair(link_from_json(entry.at(0)), link_from_json(entry.at(1))),
                      entry.at(2).get<double>());
    return p;
}

CalibrationFixture load_calibration(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open calibration fixture: " + path);
    json j;
    in >> j;
    CalibrationFixture f;
    const auto& par = j.at("params");
    f.params.eps1 = par.at("eps1").get<double>();
    f.params.eps2 = par.at("eps2").get<double>();
    f.params.eps_ro = par.at("eps_ro").get<double>();
    f.params.p_xt = par.at("p_xt").get<double>();
    f.params.hop_decay = par.at("hop_decay").get<double>();
    f.params.chi_base = par.at("chi_base").get<double>();
    f.params.chi_floor = par.at("chi_floor").get<double>();
    f.params.tail_prob = par.at("tail_prob").get<double>();
    f.params.tail_scale = par.at("tail_scale").get<double>();
    f.depth = j.at("depth").get<int>();
    f.victim_link = link_from_json(j.at("victim_link"));
    for (const auto& l : j.at("attack_links")) f.attack_links.push_back(link_from_json(l));
    f.chi_pair = j.at("chi_pair").get<double>();
    f.chi_triple = j.at("chi_triple").get<double>();
    f.chi_quad = j.at("chi_quad").get<double>();
    f.rf_pair = j.at("rf_pair").get<double>();
    f.rf_triple = j.at("rf_triple").get<double>();
    f.rf_quad = j.at("rf_quad").get<double>();
    return f;
}

CalibrationFixture load_default_calibration() {
    return load_calibration(topology::fixture_dir() + "/calibration.json");
}

void save_calibration(const CalibrationFixture& f, const std::string& path) {
    json j;
    j["params"] = {{"eps1", f.params.eps1},       {"eps2", f.params.eps2},
                   {"eps_ro", f.params.eps_ro},   {"p_xt", f.params.p_xt},
                   {"hop_decay", f.params.hop_decay}, {"chi_base", f.params.chi_base},
                   {"chi_floor", f.params.chi_floor}, {"tail_prob", f.params.tail_prob},
                   {"tail_scale", f.params.tail_scale}};
    j["depth"] = f.depth;
    j["victim_link"] = link_to_json(f.victim_link);
    j["attack_links"] = json::array();
    for (const auto& l : f.attack_links) j["attack_links"].push_back(link_to_json(l));
    j["chi_pair"] = f.chi_pair;
    j["chi_triple"] = f.chi_triple;
    j["chi_quad"] = f.chi_quad;
    j["rf_pair"] = f.rf_pair;
    j["rf_triple"] = f.rf_triple;
    j["rf_quad"] = f.rf_quad;
    std::ofstream out(path);
    out << j.dump(1) << "\n";
}

NoiseProfile scenario_profile(const CalibrationFixture& f, int n_attack_links) {
    if (n_attack_links < 1 || n_attack_links > static_cast<int>(f.attack_links.size()))
        throw std::runtime_error("scenario supports 1.." +
                                 std::to_string(f.attack_links.size()) + " attack links");
    NoiseProfile p;
    p.eps1 = f.params.eps1;
    p.eps2 = f.params.eps2;
    p.eps_ro = f.params.eps_ro;
    double chi = n_attack_links == 1 ? f.chi_pair : n_attack_links == 2 ? f.chi_triple : f.chi_quad;
    for (int k = 0; k < n_attack_links; ++k)
        p.set_crosstalk(f.victim_link, f.attack_links[k], chi);
    return p;
}

}  // namespace qontexts::sim
