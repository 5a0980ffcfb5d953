#pragma once

#include <map>
#include <stdexcept>
#include <string>

namespace qontexts::sim {

/// Histogram of measured bitstrings for one program in one context.
/// Counts are doubles so that exact probabilities and weighted merges
/// can be represented without rounding; Distribution keys are ordered
/// so every consumer iterates deterministically.
struct Distribution {
    std::map<std::string, double> counts;
    double trials = 0.0;

    void add(const std::string& bits, double n = 1.0) {
        counts[bits] += n;
        trials += n;
    }

    double probability(const std::string& bits) const {
        if (trials <= 0.0) return 0.0;
        auto it = counts.find(bits);
        return it == counts.end() ? 0.0 : it->second / trials;
    }

    bool empty() const { return counts.empty() || trials <= 0.0; }

    /// Outcome with the largest count; ties broken by lexicographically
    /// smallest bitstring. `tie` reports whether a tie was broken.
    std::string argmax(bool* tie = nullptr) const {
        if (empty()) throw std::runtime_error("argmax of empty distribution");
        std::string best;
        double best_count = -1.0;
        bool tied = false;
        for (const auto& [bits, c] : counts) {
            if (c > best_count) {
                best = bits;
                best_count = c;
                tied = false;
            } else if (c == best_count) {
                tied = true;  // map order is ascending, keep the earlier key
            }
        }
        if (tie) *tie = tied;
        return best;
    }
};

}  // namespace qontexts::sim
