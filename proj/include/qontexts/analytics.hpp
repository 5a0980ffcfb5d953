#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qontexts/generators.hpp"
#include "qontexts/noise.hpp"
#include "qontexts/simulator.hpp"

namespace qontexts::analytics {

struct AnalyticsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Closed-form resilience model parameters.
struct ResilienceParams {
    int total_programs = 100;      // N
    int attacker_programs = 20;    // K
    double alpha = 0.4;            // per-context attack success probability
    int contexts = 8;              // C
    double beta = 0.75;            // attacked-context fraction threshold

    void validate() const;
};

/// Probability a program is attacked without context switching: alpha*K/N.
double p_baseline(const ResilienceParams& rp);

/// Probability that exactly m contexts are successfully attacked while
/// every other context runs a benign program:
///   binom(C, m) * (alpha*K/N)^m * (1 - K/N)^(C-m)
double p_exactly(const ResilienceParams& rp, int m);

/// Probability that at least ceil(beta*C) contexts are successfully
/// attacked (benign remainder), summing binom(C, i) terms.
double p_at_least(const ResilienceParams& rp);

/// Smallest C <= 10000 for which `candidate` (with that C) is at least as
/// resilient as `target`.
int min_contexts(const ResilienceParams& target, ResilienceParams candidate);

/// Latency model parameters.
struct LatencyParams {
    long trials = 10000;        // T
    double t_trial = 100e-6;    // seconds per trial
    double t_wait = 250e-6;     // repetition delay between trials
    double t_load = 250e-6;     // program loading time
    int concurrency = 2;        // S
    int contexts = 8;           // C

    double t_switch() const { return t_load > t_wait ? t_load : t_wait; }
    void validate() const;
};

double tau_isolated(const LatencyParams& lp);
double tau_multiprog(const LatencyParams& lp);
double tau_qontexts(const LatencyParams& lp);

enum class Mode { isolated, emp, qontexts };

Mode mode_from_string(const std::string& name);
std::string mode_to_string(Mode m);

/// tau_isolated / tau_mode.
double throughput(Mode mode, const LatencyParams& lp);

/// Queue simulation parameters. `arrival_rate` is the number of new jobs
/// arriving during one isolated job execution time.
struct QueueParams {
    double arrival_rate = 4.0;
    int n_jobs = 2000;
    Mode mode = Mode::isolated;
    uint64_t seed = 1;
};

struct QueueStats {
    double mean_completion = 0.0;  // wait + service
    double mean_wait = 0.0;
    bool divergent = false;  // arrival rate exceeds service capacity
    long completed = 0;
};

/// FIFO discrete-event simulation with exponential inter-arrival times:
/// one server for isolated, S parallel slots for the multi-programmed
/// modes, deterministic service times from the latency model.
QueueStats simulate_queue(const QueueParams& qp, const LatencyParams& lp);

/// How each landscape point is executed.
struct LandscapeExec {
    enum class Kind { ideal, isolated, emp_zkta, contexts } kind = Kind::ideal;
    const topology::Device* dev = nullptr;
    const sim::NoiseProfile* profile = nullptr;
    long trials = 2000;
    uint64_t seed = 1;
    circuit::Program attacker;                 // emp_zkta mode
    std::vector<circuit::Program> co_runners;  // contexts mode, one per context
    int buffer = 1;
};

/// Expected MaxCut objective of a p=1 QAOA circuit over a (gamma, beta)
/// grid; element [i][j] corresponds to (gamma[i], beta[j]).
std::vector<std::vector<double>> landscape_sweep(const circuit::Graph& graph,
                                                 const std::vector<double>& gammas,
                                                 const std::vector<double>& betas,
                                                 const LandscapeExec& exec);

/// Expected cut value of a distribution over node-assignment bitstrings.
double expected_cut(const circuit::Graph& graph, const sim::Distribution& dist);

}  // namespace qontexts::analytics
