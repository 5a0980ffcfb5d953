#include "qontexts/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "qontexts/detection.hpp"
#include "qontexts/rng.hpp"

namespace qontexts::sim {

using circuit::GateKind;

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
}

Statevector::Statevector(int n_qubits) : n_(n_qubits) {
    if (n_qubits < 0 || n_qubits > kMaxQubits)
        throw SimulatorError("program width " + std::to_string(n_qubits) + " exceeds the " +
                             std::to_string(kMaxQubits) + "-qubit cap");
    amp_.assign(uint64_t(1) << n_, {0.0, 0.0});
    amp_[0] = {1.0, 0.0};
}

void Statevector::apply(const Gate& g) {
    const uint64_t dim = amp_.size();
    switch (g.kind) {
        case GateKind::H: {
            const uint64_t bit = uint64_t(1) << g.q0;
            for (uint64_t i = 0; i < dim; ++i) {
                if (i & bit) continue;
                auto a = amp_[i];
                auto b = amp_[i | bit];
                amp_[i] = (a + b) * kInvSqrt2;
                amp_[i | bit] = (a - b) * kInvSqrt2;
            }
            break;
        }
        case GateKind::X: {
            const uint64_t bit = uint64_t(1) << g.q0;
            for (uint64_t i = 0; i < dim; ++i)
                if (!(i & bit)) std::swap(amp_[i], amp_[i | bit]);
            break;
        }
        case GateKind::Z: {
            const uint64_t bit = uint64_t(1) << g.q0;
            for (uint64_t i = 0; i < dim; ++i)
                if (i & bit) amp_[i] = -amp_[i];
            break;
        }
        case GateKind::RZ: {
            const uint64_t bit = uint64_t(1) << g.q0;
            const std::complex<double> phase0(std::cos(g.angle / 2), -std::sin(g.angle / 2));
            const std::complex<double> phase1(std::cos(g.angle / 2), std::sin(g.angle / 2));
            for (uint64_t i = 0; i < dim; ++i) amp_[i] *= (i & bit) ? phase1 : phase0;
            break;
        }
        case GateKind::CX: {
            const uint64_t cbit = uint64_t(1) << g.q0;
            const uint64_t tbit = uint64_t(1) << g.q1;
            for (uint64_t i = 0; i < dim; ++i)
                if ((i & cbit) && !(i & tbit)) std::swap(amp_[i], amp_[i | tbit]);
            break;
        }
        case GateKind::Measure:
        case GateKind::Barrier: break;
    }
}

void Statevector::apply_pauli(int q, int which) {
    if (which == 0) {
        apply(Gate::x(q));
    } else if (which == 2) {
        apply(Gate::z(q));
    } else {
        // Y = iXZ; the global phase is irrelevant for sampling
        apply(Gate::z(q));
        apply(Gate::x(q));
    }
}

uint64_t Statevector::sample_index(double u) const {
    double acc = 0.0;
    const uint64_t dim = amp_.size();
    for (uint64_t i = 0; i < dim; ++i) {
        acc += std::norm(amp_[i]);
        if (u < acc) return i;
    }
    return dim - 1;
}

std::vector<double> Statevector::probabilities() const {
    std::vector<double> p(amp_.size());
    for (size_t i = 0; i < amp_.size(); ++i) p[i] = std::norm(amp_[i]);
    return p;
}

namespace {

std::string outcome_bits(uint64_t index, const std::vector<int>& measured) {
    std::string bits(measured.size(), '0');
    for (size_t k = 0; k < measured.size(); ++k)
        if (index & (uint64_t(1) << measured[k])) bits[k] = '1';
    return bits;
}

std::vector<int> measured_or_all(const Program& p) {
    auto qs = p.measured_qubits();
    if (qs.empty())
        for (int q = 0; q < p.n_qubits; ++q) qs.push_back(q);
    return qs;
}

}  // namespace

Distribution simulate_ideal(const Program& p, double nominal_trials) {
    p.validate();
    Statevector sv(p.n_qubits);
    for (const auto& layer : p.layers)
        for (const auto& g : layer) sv.apply(g);
    auto probs = sv.probabilities();
    auto measured = measured_or_all(p);
    Distribution dist;
    for (uint64_t i = 0; i < probs.size(); ++i) {
        if (probs[i] <= 0.0) continue;
        dist.counts[outcome_bits(i, measured)] += probs[i] * nominal_trials;
    }
    dist.trials = nominal_trials;
    return dist;
}

namespace {

// One CX occurrence with its layer-dependent effective error rate.
struct ErrorSite {
    int layer = 0;
    size_t gate_index = 0;  // within the flattened per-layer gate list
    double rate = 0.0;
    bool two_qubit = false;
};

struct PreparedProgram {
    const MappedProgram* mapped = nullptr;
    std::vector<int> measured;
    std::vector<std::vector<Gate>> layers;  // compute gates only, layer-aligned
    std::vector<std::vector<double>> rates; // per gate: error probability
    Statevector ideal{0};
    std::vector<double> ideal_cdf;
};

}  // namespace

std::vector<Distribution> sample_noisy(const std::vector<MappedProgram>& coscheduled,
                                       const NoiseProfile& profile, long trials, uint64_t seed) {
    if (coscheduled.empty()) return {};
    if (trials < 0) throw SimulatorError("negative trial count");

    // Disjoint-region check.
    std::set<int> seen_qubits;
    for (const auto& mp : coscheduled) {
        if (mp.program.n_qubits > kMaxQubits)
            throw SimulatorError("program width exceeds the simulator cap");
        for (int q : mp.region.qubits)
            if (!seen_qubits.insert(q).second)
                throw SimulatorError("co-scheduled regions overlap on qubit " + std::to_string(q));
    }

    size_t n_layers = 0;
    for (const auto& mp : coscheduled) n_layers = std::max(n_layers, mp.program.layers.size());

    // Concurrent CX links per global layer (across all programs).
    std::vector<std::vector<topology::Link>> concurrent(n_layers);
    for (const auto& mp : coscheduled) {
        for (size_t t = 0; t < mp.program.layers.size(); ++t)
            for (const auto& g : mp.program.layers[t])
                if (g.kind == GateKind::CX) concurrent[t].push_back(mp.physical_link(g));
    }

    std::vector<PreparedProgram> prepared(coscheduled.size());
    for (size_t pi = 0; pi < coscheduled.size(); ++pi) {
        auto& prep = prepared[pi];
        const auto& mp = coscheduled[pi];
        mp.program.validate();
        prep.mapped = &mp;
        prep.measured = measured_or_all(mp.program);
        prep.layers.resize(mp.program.layers.size());
        prep.rates.resize(mp.program.layers.size());
        for (size_t t = 0; t < mp.program.layers.size(); ++t) {
            for (const auto& g : mp.program.layers[t]) {
                if (g.kind == GateKind::Measure || g.kind == GateKind::Barrier) continue;
                double rate = 0.0;
                if (g.kind == GateKind::CX) {
                    topology::Link mine = mp.physical_link(g);
                    double extra = 0.0;
                    for (const auto& other : concurrent[t])
                        if (!(other == mine)) extra += profile.crosstalk(mine, other);
                    rate = std::min(1.0, profile.eps2 + extra);
                } else {
                    rate = profile.eps1;
                }
                prep.layers[t].push_back(g);
                prep.rates[t].push_back(rate);
            }
        }
        // Error-free reference state and its sampling CDF.
        Statevector sv(mp.program.n_qubits);
        for (const auto& layer : prep.layers)
            for (const auto& g : layer) sv.apply(g);
        auto probs = sv.probabilities();
        prep.ideal_cdf.resize(probs.size());
        double acc = 0.0;
        for (size_t i = 0; i < probs.size(); ++i) {
            acc += probs[i];
            prep.ideal_cdf[i] = acc;
        }
        prep.ideal = std::move(sv);
    }

    struct Injection {
        size_t layer;
        size_t gate;
        int pauli;  // 1q: 0..2; 2q: 0..14
    };

    std::vector<Distribution> out(coscheduled.size());
    for (size_t pi = 0; pi < coscheduled.size(); ++pi) {
        auto& prep = prepared[pi];
        const Program& prog = prep.mapped->program;
        std::vector<Injection> injections;
        for (long trial = 0; trial < trials; ++trial) {
            rng::Stream stream(rng::mix(seed, pi, static_cast<uint64_t>(trial)));
            injections.clear();
            for (size_t t = 0; t < prep.layers.size(); ++t) {
                for (size_t gi = 0; gi < prep.layers[t].size(); ++gi) {
                    double r = prep.rates[t][gi];
                    if (r <= 0.0) continue;
                    if (stream.uniform() < r) {
                        bool two = prep.layers[t][gi].kind == GateKind::CX;
                        int pauli = static_cast<int>(stream.below(two ? 15 : 3));
                        injections.push_back({t, gi, pauli});
                    }
                }
            }

            uint64_t index;
            if (injections.empty()) {
                double u = stream.uniform();
                index = static_cast<uint64_t>(
                    std::lower_bound(prep.ideal_cdf.begin(), prep.ideal_cdf.end(), u) -
                    prep.ideal_cdf.begin());
                if (index >= prep.ideal_cdf.size()) index = prep.ideal_cdf.size() - 1;
            } else {
                Statevector sv(prog.n_qubits);
                size_t next = 0;
                for (size_t t = 0; t < prep.layers.size(); ++t) {
                    for (size_t gi = 0; gi < prep.layers[t].size(); ++gi) {
                        const Gate& g = prep.layers[t][gi];
                        sv.apply(g);
                        while (next < injections.size() && injections[next].layer == t &&
                               injections[next].gate == gi) {
                            int p = injections[next].pauli;
                            if (g.kind == GateKind::CX) {
                                // index 0..14 over the 15 non-identity two-qubit Paulis
                                int first = (p + 1) / 4;
                                int second = (p + 1) % 4;
                                if (first) sv.apply_pauli(g.q0, first - 1);
                                if (second) sv.apply_pauli(g.q1, second - 1);
                            } else {
                                sv.apply_pauli(g.q0, p);
                            }
                            ++next;
                        }
                    }
                }
                index = sv.sample_index(stream.uniform());
            }

            std::string bits = outcome_bits(index, prep.measured);
            if (profile.eps_ro > 0.0) {
                for (auto& ch : bits)
                    if (stream.uniform() < profile.eps_ro) ch = (ch == '0') ? '1' : '0';
            }
            out[pi].add(bits);
        }
        if (trials == 0) out[pi].trials = 0.0;
    }
    return out;
}

double relative_fidelity(const Distribution& iso, const Distribution& shared,
                         const Distribution& ideal) {
    double f_iso = detect::fidelity(ideal, iso);
    if (f_iso <= 0.0) throw SimulatorError("isolated fidelity is zero");
    return detect::fidelity(ideal, shared) / f_iso;
}

}  // namespace qontexts::sim
