#include "qontexts/topology.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <limits>
#include <set>

#include <json.hpp>

#ifndef QONTEXTS_FIXTURE_DIR
#define QONTEXTS_FIXTURE_DIR "fixtures"
#endif

namespace qontexts::topology {

using nlohmann::json;

void Device::build_adjacency() const {
    if (!adj_.empty()) return;
    adj_.assign(n_qubits, {});
    for (const auto& l : links) {
        adj_[l.a].push_back(l.b);
        adj_[l.b].push_back(l.a);
    }
    for (auto& v : adj_) std::sort(v.begin(), v.end());
}

bool Device::has_link(const Link& l) const {
    return std::binary_search(links.begin(), links.end(), l);
}

const std::vector<int>& Device::neighbors(int q) const {
    build_adjacency();
    return adj_.at(q);
}

std::vector<int> Device::qubit_distances(int source) const {
    build_adjacency();
    std::vector<int> dist(n_qubits, -1);
    std::deque<int> frontier{source};
    dist[source] = 0;
    while (!frontier.empty()) {
        int u = frontier.front();
        frontier.pop_front();
        for (int v : adj_[u]) {
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                frontier.push_back(v);
            }
        }
    }
    return dist;
}

bool Device::connected() const {
    if (n_qubits == 0) return false;
    auto d = qubit_distances(0);
    return std::none_of(d.begin(), d.end(), [](int x) { return x < 0; });
}

namespace {

Device validate(Device dev) {
    std::set<Link> seen;
    for (const auto& l : dev.links) {
        if (l.a == l.b) throw TopologyError("self-loop link on qubit " + std::to_string(l.a));
        if (l.a < 0 || l.b >= dev.n_qubits)
            throw TopologyError("link endpoint out of range: (" + std::to_string(l.a) + "," +
                                std::to_string(l.b) + ")");
        if (!seen.insert(l).second)
            throw TopologyError("duplicate link (" + std::to_string(l.a) + "," +
                                std::to_string(l.b) + ")");
    }
    dev.links.assign(seen.begin(), seen.end());
    return dev;
}

}  // namespace

std::string fixture_dir() {
    if (const char* env = std::getenv("QONTEXT_BENCH_FIXTURES")) return env;
    return QONTEXTS_FIXTURE_DIR;
}

Device make_device_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw TopologyError("cannot open topology file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw TopologyError("malformed topology file " + path + ": " + e.what());
    }
    if (!j.contains("n_qubits") || !j.contains("links"))
        throw TopologyError("topology file " + path + " missing n_qubits/links");
    Device dev;
    dev.name = j.value("name", path);
    dev.n_qubits = j.at("n_qubits").get<int>();
    for (const auto& e : j.at("links")) {
        if (!e.is_array() || e.size() != 2)
            throw TopologyError("topology file " + path + ": link entries must be pairs");
        dev.links.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    return validate(std::move(dev));
}

Device make_device(DevicePreset preset) {
    switch (preset) {
        case DevicePreset::hanoi27: return make_device("hanoi27");
        case DevicePreset::osaka127: return make_device("osaka127");
        case DevicePreset::sherbrooke127: return make_device("sherbrooke127");
    }
    throw TopologyError("unknown device preset");
}

Device make_device(const std::string& preset_name) {
    static const std::set<std::string> presets{"hanoi27", "osaka127", "sherbrooke127"};
    if (!presets.count(preset_name))
        throw TopologyError("unknown device preset: " + preset_name);
    Device dev = make_device_from_file(fixture_dir() + "/topologies/" + preset_name + ".json");
    dev.name = preset_name;
    if (!dev.connected()) throw TopologyError("preset coupling map is not connected");
    return dev;
}

int hop_distance(const Device& dev, const Link& a, const Link& b) {
    if (!dev.has_link(a) || !dev.has_link(b)) throw TopologyError("link not in device");
    if (a == b || a.a == b.a || a.a == b.b || a.b == b.a || a.b == b.b) return 0;
    auto da = dev.qubit_distances(a.a);
    auto db = dev.qubit_distances(a.b);
    int best = std::numeric_limits<int>::max();
    for (int q : {b.a, b.b}) {
        if (da[q] >= 0) best = std::min(best, da[q]);
        if (db[q] >= 0) best = std::min(best, db[q]);
    }
    if (best == std::numeric_limits<int>::max())
        throw TopologyError("links lie in disconnected components");
    return best;
}

bool region_connected(const Device& dev, const Region& region) {
    if (region.qubits.empty()) return false;
    std::set<int> members(region.qubits.begin(), region.qubits.end());
    std::set<int> seen{region.qubits.front()};
    std::deque<int> frontier{region.qubits.front()};
    while (!frontier.empty()) {
        int u = frontier.front();
        frontier.pop_front();
        for (int v : dev.neighbors(u)) {
            if (members.count(v) && !seen.count(v)) {
                seen.insert(v);
                frontier.push_back(v);
            }
        }
    }
    return seen.size() == members.size();
}

namespace {

// Grows one connected region of the requested size starting at `seed`,
// never entering blocked qubits. Frontier candidates are ranked by
// (best link weight into the region, qubit index).
std::optional<std::vector<int>> grow_region(const Device& dev, int seed, int size,
                                            const std::vector<bool>& blocked,
                                            const std::map<Link, double>* weights) {
    std::vector<int> region{seed};
    std::set<int> in_region{seed};
    while (static_cast<int>(region.size()) < size) {
        int best_q = -1;
        double best_w = std::numeric_limits<double>::max();
        for (int q : in_region) {
            for (int v : dev.neighbors(q)) {
                if (blocked[v] || in_region.count(v)) continue;
                double w = 0.0;
                if (weights) {
                    auto it = weights->find(Link(q, v));
                    w = it == weights->end() ? 0.0 : it->second;
                }
                if (best_q < 0 || w < best_w || (w == best_w && v < best_q)) {
                    best_q = v;
                    best_w = w;
                }
            }
        }
        if (best_q < 0) return std::nullopt;  // region cannot grow further
        region.push_back(best_q);
        in_region.insert(best_q);
    }
    return region;
}

}  // namespace

std::vector<Region> allocate_regions(const Device& dev, const std::vector<int>& sizes, int buffer,
                                     const std::map<Link, double>* error_weights) {
    int total = 0;
    for (int s : sizes) {
        if (s <= 0) throw AllocationError("region sizes must be positive");
        total += s;
    }
    if (total > dev.n_qubits)
        throw AllocationError("cannot co-schedule: " + std::to_string(total) + " qubits requested on a " +
                              std::to_string(dev.n_qubits) + "-qubit device");

    std::vector<Region> regions;
    std::vector<bool> blocked(dev.n_qubits, false);
    for (size_t idx = 0; idx < sizes.size(); ++idx) {
        std::optional<std::vector<int>> grown;
        for (int seed = 0; seed < dev.n_qubits && !grown; ++seed) {
            if (blocked[seed]) continue;
            grown = grow_region(dev, seed, sizes[idx], blocked, error_weights);
        }
        if (!grown)
            throw AllocationError("cannot co-schedule: no isolated placement for region " +
                                  std::to_string(idx) + " of size " + std::to_string(sizes[idx]) +
                                  "; fall back to fewer programs");
        Region r;
        r.qubits = *grown;
        regions.push_back(r);
        // Block the region plus everything within `buffer` hops of it.
        std::vector<int> dist(dev.n_qubits, -1);
        std::deque<int> frontier;
        for (int q : r.qubits) {
            dist[q] = 0;
            frontier.push_back(q);
            blocked[q] = true;
        }
        while (!frontier.empty()) {
            int u = frontier.front();
            frontier.pop_front();
            if (dist[u] >= buffer) continue;
            for (int v : dev.neighbors(u)) {
                if (dist[v] < 0) {
                    dist[v] = dist[u] + 1;
                    blocked[v] = true;
                    frontier.push_back(v);
                }
            }
        }
    }
    return regions;
}

}  // namespace qontexts::topology
