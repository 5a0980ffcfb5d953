#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qontexts::topology {

/// Unordered pair of physical qubits, stored with first < second.
struct Link {
    int a = 0;
    int b = 0;

    Link() = default;
    Link(int x, int y) : a(x < y ? x : y), b(x < y ? y : x) {}

    bool operator==(const Link& o) const { return a == o.a && b == o.b; }
    bool operator!=(const Link& o) const { return !(*this == o); }
    bool operator<(const Link& o) const { return a != o.a ? a < o.a : b < o.b; }
};

/// Coupling graph of a quantum device.
struct Device {
    std::string name;
    int n_qubits = 0;
    std::vector<Link> links;  // sorted, unique

    bool has_link(const Link& l) const;
    const std::vector<int>& neighbors(int q) const;

    /// Shortest-path edge distance from `source` to every qubit
    /// (-1 when unreachable).
    std::vector<int> qubit_distances(int source) const;

    bool connected() const;

private:
    mutable std::vector<std::vector<int>> adj_;  // built lazily
    void build_adjacency() const;
};

/// Set of qubits assigned to one program.
struct Region {
    std::vector<int> qubits;
    std::string owner;
};

enum class DevicePreset { hanoi27, osaka127, sherbrooke127 };

/// Loads a preset coupling map from the bundled fixture files.
/// The fixture directory defaults to the build-time path and can be
/// overridden with the QONTEXT_BENCH_FIXTURES environment variable.
Device make_device(DevicePreset preset);
Device make_device(const std::string& preset_name);

/// Loads {n_qubits, links: [[a,b],...]} from a JSON topology file.
Device make_device_from_file(const std::string& path);

std::string fixture_dir();

/// Minimum over the four endpoint pairs of shortest-path edge distance.
/// Links sharing a qubit are at distance 0.
int hop_distance(const Device& dev, const Link& a, const Link& b);

/// Greedy allocation of mutually isolated connected regions.
/// Regions are grown by BFS from seed qubits tried in ascending index
/// order; with error_weights present, frontier qubits reachable through
/// low-weight links are preferred. Any two regions end up at qubit
/// distance >= buffer+1 from each other.
/// Throws AllocationError when no placement exists.
std::vector<Region> allocate_regions(const Device& dev, const std::vector<int>& sizes,
                                     int buffer = 1,
                                     const std::map<Link, double>* error_weights = nullptr);

struct AllocationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TopologyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// True when the region's qubits induce a connected subgraph.
bool region_connected(const Device& dev, const Region& region);

}  // namespace qontexts::topology
