#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "qontexts/circuit.hpp"
#include "qontexts/distribution.hpp"
#include "qontexts/noise.hpp"

namespace qontexts::sim {

using circuit::Gate;
using circuit::MappedProgram;
using circuit::Program;

/// Hard cap on simulated program width.
constexpr int kMaxQubits = 24;

struct SimulatorError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Dense complex amplitude vector; qubit q is bit q of the index.
class Statevector {
public:
    explicit Statevector(int n_qubits);

    int n_qubits() const { return n_; }

    void apply(const Gate& g);
    void apply_pauli(int q, int which);  // 0=X, 1=Y, 2=Z

    /// Probability-weighted outcome index for a uniform draw u in [0,1).
    uint64_t sample_index(double u) const;

    std::vector<double> probabilities() const;

private:
    int n_ = 0;
    std::vector<std::complex<double>> amp_;
};

/// Exact measurement distribution via statevector evolution. Counts hold
/// probabilities scaled to `nominal_trials`.
Distribution simulate_ideal(const Program& p, double nominal_trials = 8192.0);

/// Seeded noisy sampling of co-scheduled programs. Regions must be
/// disjoint; layers align by index across programs. Each program evolves
/// in its own statevector; crosstalk only inflates CX error rates: a CX
/// on physical link l in a global layer suffers
///   eps_eff = min(1, eps2 + sum over concurrent links l' of chi(l, l'))
/// with stochastic two-qubit Pauli injection, one-qubit depolarizing on
/// single-qubit gates, and readout flips at measurement. Bit-identical
/// for a fixed (seed, trial index).
std::vector<Distribution> sample_noisy(const std::vector<MappedProgram>& coscheduled,
                                       const NoiseProfile& profile, long trials, uint64_t seed);

/// fidelity(ideal, shared) / fidelity(ideal, iso); the fidelity is the
/// total-variation complement from the detection module.
double relative_fidelity(const Distribution& iso, const Distribution& shared,
                         const Distribution& ideal);

}  // namespace qontexts::sim
