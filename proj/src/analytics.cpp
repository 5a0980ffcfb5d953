#include "qontexts/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "qontexts/detection.hpp"
#include "qontexts/rng.hpp"
#include "qontexts/topology.hpp"

namespace qontexts::analytics {

void ResilienceParams::validate() const {
    if (total_programs <= 0 || attacker_programs < 0 || attacker_programs > total_programs)
        throw AnalyticsError("need 0 <= K <= N with N > 0");
    if (alpha < 0.0 || alpha > 1.0 || beta < 0.0 || beta > 1.0)
        throw AnalyticsError("alpha and beta must lie in [0, 1]");
    if (contexts < 1) throw AnalyticsError("contexts must be >= 1");
}

namespace {

double binom(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

double p_baseline(const ResilienceParams& rp) {
    rp.validate();
    return rp.alpha * rp.attacker_programs / rp.total_programs;
}

double p_exactly(const ResilienceParams& rp, int m) {
    rp.validate();
    if (m < 0 || m > rp.contexts) throw AnalyticsError("m must lie in [0, C]");
    double attack = rp.alpha * rp.attacker_programs / rp.total_programs;
    double benign = 1.0 - static_cast<double>(rp.attacker_programs) / rp.total_programs;
    return binom(rp.contexts, m) * std::pow(attack, m) * std::pow(benign, rp.contexts - m);
}

double p_at_least(const ResilienceParams& rp) {
    rp.validate();
    int from = static_cast<int>(std::ceil(rp.beta * rp.contexts - 1e-12));
    double sum = 0.0;
    for (int i = from; i <= rp.contexts; ++i) sum += p_exactly(rp, i);
    return sum;
}

int min_contexts(const ResilienceParams& target, ResilienceParams candidate) {
    target.validate();
    double goal = p_at_least(target);
    for (int c = 1; c <= 10000; ++c) {
        candidate.contexts = c;
        if (p_at_least(candidate) <= goal) return c;
    }
    throw AnalyticsError("no context count up to 10000 reaches the target resilience");
}

void LatencyParams::validate() const {
    if (trials < 1 || t_trial <= 0.0 || t_wait <= 0.0 || t_load <= 0.0 || concurrency < 1 ||
        contexts < 1)
        throw AnalyticsError("latency parameters must be positive");
}

double tau_isolated(const LatencyParams& lp) {
    lp.validate();
    return lp.t_load + lp.trials * lp.t_trial + (lp.trials - 1) * lp.t_wait;
}

double tau_multiprog(const LatencyParams& lp) { return tau_isolated(lp) / lp.concurrency; }

double tau_qontexts(const LatencyParams& lp) {
    lp.validate();
    return (lp.contexts * lp.t_switch() + lp.trials * lp.t_trial + (lp.trials - 1) * lp.t_wait) /
           lp.concurrency;
}

Mode mode_from_string(const std::string& name) {
    if (name == "isolated") return Mode::isolated;
    if (name == "emp") return Mode::emp;
    if (name == "qontexts" || name == "qontexts_ad") return Mode::qontexts;
    throw AnalyticsError("unknown mode: " + name);
}

std::string mode_to_string(Mode m) {
    switch (m) {
        case Mode::isolated: return "isolated";
        case Mode::emp: return "emp";
        case Mode::qontexts: return "qontexts";
    }
    return "?";
}

double throughput(Mode mode, const LatencyParams& lp) {
    switch (mode) {
        case Mode::isolated: return 1.0;
        case Mode::emp: return tau_isolated(lp) / tau_multiprog(lp);
        case Mode::qontexts: return tau_isolated(lp) / tau_qontexts(lp);
    }
    return 0.0;
}

QueueStats simulate_queue(const QueueParams& qp, const LatencyParams& lp) {
    if (qp.arrival_rate <= 0.0) throw AnalyticsError("arrival rate must be positive");
    if (qp.n_jobs < 1) throw AnalyticsError("need at least one job");

    const double service = qp.mode == Mode::isolated  ? tau_isolated(lp)
                           : qp.mode == Mode::emp     ? tau_multiprog(lp)
                                                      : tau_qontexts(lp);
    const int slots = qp.mode == Mode::isolated ? 1 : lp.concurrency;
    // load is defined against one job's isolated execution time
    const double mean_interarrival = tau_isolated(lp) / qp.arrival_rate;

    QueueStats stats;
    stats.divergent = qp.arrival_rate * service / (slots * tau_isolated(lp)) > 1.0;

    rng::Stream stream(rng::mix(qp.seed, 0x71756575ULL));
    std::vector<double> arrivals(qp.n_jobs);
    double t = 0.0;
    for (int i = 0; i < qp.n_jobs; ++i) {
        t += stream.exponential(mean_interarrival);
        arrivals[i] = t;
    }

    std::priority_queue<double, std::vector<double>, std::greater<>> busy_until;  // per slot
    double total_completion = 0.0;
    double total_wait = 0.0;
    long in_system = 0;
    for (int i = 0; i < qp.n_jobs; ++i) {
        double start = arrivals[i];
        if (static_cast<int>(busy_until.size()) >= slots) {
            start = std::max(start, busy_until.top());
            busy_until.pop();
        }
        double finish = start + service;
        busy_until.push(finish);
        total_wait += start - arrivals[i];
        total_completion += finish - arrivals[i];
        ++in_system;  // conservation bookkeeping: every arrival is eventually served
    }
    stats.completed = in_system;
    stats.mean_completion = total_completion / qp.n_jobs;
    stats.mean_wait = total_wait / qp.n_jobs;
    return stats;
}

double expected_cut(const circuit::Graph& graph, const sim::Distribution& dist) {
    if (dist.empty()) throw AnalyticsError("empty distribution in expected_cut");
    double acc = 0.0;
    for (const auto& [bits, count] : dist.counts) {
        double cut = 0.0;
        for (const auto& [a, b, w] : graph.edges) {
            if (a >= static_cast<int>(bits.size()) || b >= static_cast<int>(bits.size()))
                throw AnalyticsError("bitstring shorter than graph nodes");
            if (bits[a] != bits[b]) cut += w;
        }
        acc += cut * count;
    }
    return acc / dist.trials;
}

std::vector<std::vector<double>> landscape_sweep(const circuit::Graph& graph,
                                                 const std::vector<double>& gammas,
                                                 const std::vector<double>& betas,
                                                 const LandscapeExec& exec) {
    if (gammas.empty() || betas.empty()) throw AnalyticsError("empty landscape grid");
    graph.validate();

    std::vector<std::vector<double>> grid(gammas.size(), std::vector<double>(betas.size(), 0.0));
    for (size_t gi = 0; gi < gammas.size(); ++gi) {
        for (size_t bi = 0; bi < betas.size(); ++bi) {
            auto qaoa = circuit::gen_qaoa_maxcut(graph, 1, {gammas[gi]}, {betas[bi]});
            qaoa.id = "landscape-" + std::to_string(gi) + "-" + std::to_string(bi);
            uint64_t point_seed = rng::mix(exec.seed, gi, bi);

            sim::Distribution dist;
            switch (exec.kind) {
                case LandscapeExec::Kind::ideal: {
                    dist = sim::simulate_ideal(qaoa);
                    break;
                }
                case LandscapeExec::Kind::isolated: {
                    auto weights = sim::link_error_weights(*exec.dev, *exec.profile);
                    auto regions = topology::allocate_regions(*exec.dev, {qaoa.n_qubits},
                                                              exec.buffer, &weights);
                    auto mapped = circuit::map_onto_region(qaoa, regions[0]);
                    dist = sim::sample_noisy({mapped}, *exec.profile, exec.trials, point_seed)[0];
                    break;
                }
                case LandscapeExec::Kind::emp_zkta: {
                    auto weights = sim::link_error_weights(*exec.dev, *exec.profile);
                    auto regions = topology::allocate_regions(
                        *exec.dev, {qaoa.n_qubits, exec.attacker.n_qubits}, exec.buffer, &weights);
                    auto mapped_q = circuit::map_onto_region(qaoa, regions[0]);
                    auto mapped_a = circuit::map_onto_region(exec.attacker, regions[1]);
                    dist = sim::sample_noisy({mapped_q, mapped_a}, *exec.profile, exec.trials,
                                             point_seed)[0];
                    break;
                }
                case LandscapeExec::Kind::contexts: {
                    // one context per co-runner, equal trial split, merged
                    if (exec.co_runners.empty())
                        throw AnalyticsError("contexts landscape needs co-runners");
                    long per = std::max<long>(1, exec.trials / exec.co_runners.size());
                    std::vector<sim::Distribution> dists;
                    auto weights = sim::link_error_weights(*exec.dev, *exec.profile);
                    for (size_t c = 0; c < exec.co_runners.size(); ++c) {
                        auto regions = topology::allocate_regions(
                            *exec.dev, {qaoa.n_qubits, exec.co_runners[c].n_qubits}, exec.buffer,
                            &weights);
                        auto mapped_q = circuit::map_onto_region(qaoa, regions[0]);
                        auto mapped_c = circuit::map_onto_region(exec.co_runners[c], regions[1]);
                        dists.push_back(sim::sample_noisy({mapped_q, mapped_c}, *exec.profile, per,
                                                          rng::mix(point_seed, c))[0]);
                    }
                    dist = detect::merge_counts(dists);
                    break;
                }
            }
            grid[gi][bi] = expected_cut(graph, dist);
        }
    }
    return grid;
}

}  // namespace qontexts::analytics
