#include "qontexts/scheduler.hpp"

#include <algorithm>
#include <fstream>

#include "qontexts/rng.hpp"

namespace qontexts::sched {

using nlohmann::json;

void AuditLog::dump_jsonl(const std::string& path) const {
    std::ofstream out(path);
    out << to_jsonl();
}

std::string AuditLog::to_jsonl() const {
    std::string text;
    for (const auto& r : records) {
        text += r.dump();
        text += '\n';
    }
    return text;
}

void stagger_one_hop_cx(const Device& dev, const MappedProgram& first, MappedProgram& second) {
    auto cx_links = [](const MappedProgram& mp, size_t layer) {
        std::vector<topology::Link> links;
        if (layer < mp.program.layers.size())
            for (const auto& g : mp.program.layers[layer])
                if (g.kind == circuit::GateKind::CX) links.push_back(mp.physical_link(g));
        return links;
    };

    std::vector<circuit::Layer> adjusted;
    size_t ib = 0;
    const size_t nb = second.program.layers.size();
    size_t ia = 0;
    const size_t na = first.program.layers.size();
    while (ib < nb) {
        if (ia < na) {
            bool conflict = false;
            auto la = cx_links(first, ia);
            for (const auto& link_a : la) {
                for (const auto& link_b : cx_links(second, ib)) {
                    if (topology::hop_distance(dev, link_a, link_b) <= 1) {
                        conflict = true;
                        break;
                    }
                }
                if (conflict) break;
            }
            if (conflict) {
                adjusted.push_back({});  // idle layer for the later-arriving program
                ++ia;
                continue;
            }
        }
        adjusted.push_back(second.program.layers[ib]);
        ++ia;
        ++ib;
    }
    second.program.layers = std::move(adjusted);
}

namespace {

struct ContextExecution {
    Distribution job_dist;
    std::optional<Distribution> co_dist;
    std::vector<int> job_region;
    std::vector<int> co_region;
};

ContextExecution execute_context(const Job& job, const Job* co, const Device& dev,
                                 const NoiseProfile& profile, long trials, int buffer,
                                 uint64_t ctx_seed) {
    auto weights = sim::link_error_weights(dev, profile);
    std::vector<int> sizes{job.program.n_qubits};
    if (co) sizes.push_back(co->program.n_qubits);
    auto regions = topology::allocate_regions(dev, sizes, buffer, &weights);

    std::vector<MappedProgram> mapped;
    regions[0].owner = job.id();
    mapped.push_back(circuit::map_onto_region(job.program, regions[0]));
    if (co) {
        regions[1].owner = co->id();
        mapped.push_back(circuit::map_onto_region(co->program, regions[1]));
        stagger_one_hop_cx(dev, mapped[0], mapped[1]);
    }

    auto dists = sim::sample_noisy(mapped, profile, trials, ctx_seed);
    ContextExecution exec;
    exec.job_dist = std::move(dists[0]);
    exec.job_region = regions[0].qubits;
    if (co) {
        exec.co_dist = std::move(dists[1]);
        exec.co_region = regions[1].qubits;
    }
    return exec;
}

const Job* find_job(const std::vector<Job>& queue, const std::string& id) {
    for (const auto& j : queue)
        if (j.id() == id) return &j;
    return nullptr;
}

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Step 1-2: a fresh co-runner for `job`, honoring forced pairs first.
// Returns nullopt when the job must run alone this context.
std::optional<std::string> select_co_runner(const Job& job, const std::vector<Job>& queue,
                                            const SchedulerState& state,
                                            const ScheduleOptions& opts, rng::Stream& stream,
                                            AuditLog* audit) {
    size_t ordinal = state.eht.at(job.id()).size();
    auto forced_it = opts.forced_pairs.find(job.id());
    if (forced_it != opts.forced_pairs.end() && ordinal < forced_it->second.size())
        return forced_it->second[ordinal];

    if (opts.policy == Policy::alone) return std::nullopt;

    const auto& history = state.eht.at(job.id());
    auto eligible = [&](const Job& cand) {
        if (cand.id() == job.id()) return false;
        if (state.completed.count(cand.id())) return false;
        if (state.gal.count(cand.id())) return false;
        if (std::find(history.begin(), history.end(), cand.id()) != history.end()) return false;
        // capacity: a co-runner must still owe trials of its own
        auto it = state.eht.find(cand.id());
        if (it == state.eht.end()) return false;
        if (static_cast<int>(it->second.size()) >= opts.contexts) return false;
        return true;
    };

    if (opts.policy == Policy::queue_order) {
        for (const auto& cand : queue)
            if (eligible(cand)) return cand.id();
        return std::nullopt;  // no partner left: run alone
    }

    std::vector<std::string> pool;
    for (const auto& cand : queue)
        if (eligible(cand)) pool.push_back(cand.id());
    if (!pool.empty()) return pool[stream.below(pool.size())];

    // Co-runner exhaustion: reuse the least recently used co-runner that
    // is still available, and log a warning.
    for (const auto& prev : history) {
        if (prev.empty() || state.gal.count(prev) || state.completed.count(prev)) continue;
        if (audit)
            audit->records.push_back(json{{"type", "warning"},
                                          {"job", job.id()},
                                          {"message", "co-runner exhaustion: reusing " + prev}});
        return prev;
    }
    if (audit)
        audit->records.push_back(json{{"type", "warning"},
                                      {"job", job.id()},
                                      {"message", "co-runner exhaustion: running alone"}});
    return std::nullopt;
}

}  // namespace

Distribution mfcs(const Job& job, const std::vector<Job>& queue, SchedulerState& state,
                  const ScheduleOptions& opts, const Device& dev, const NoiseProfile& profile,
                  uint64_t seed, AuditLog* audit, detect::DetectionReport* report_out) {
    if (opts.contexts < 1) throw SchedulerError("context count must be >= 1");
    if (job.trials % opts.contexts != 0)
        throw SchedulerError(job.id() + ": trials " + std::to_string(job.trials) +
                             " not divisible by " + std::to_string(opts.contexts) + " contexts");
    const long trials_each = job.trials / opts.contexts;

    state.eht.try_emplace(job.id());
    state.rt.try_emplace(job.id());

    rng::Stream selection(rng::mix(seed, fnv1a(job.id()), 0x6d666373ULL));

    while (static_cast<int>(state.eht.at(job.id()).size()) < opts.contexts) {
        auto co_id = select_co_runner(job, queue, state, opts, selection, audit);
        const Job* co = nullptr;
        if (co_id) {
            co = find_job(queue, *co_id);
            if (!co) throw SchedulerError("co-runner " + *co_id + " not in queue");
        }

        int ctx_index = state.next_context_index++;
        uint64_t ctx_seed = rng::mix(seed, 0xc0117e87ULL, static_cast<uint64_t>(ctx_index));
        auto exec = execute_context(job, co, dev, profile, trials_each, opts.buffer, ctx_seed);

        // Step 3 + 5: both EHT sides, then both RT sides.
        state.eht.at(job.id()).push_back(co ? co->id() : "");
        state.rt.at(job.id()).push_back({exec.job_dist, co ? co->id() : "", ctx_index});
        if (co) {
            state.eht.try_emplace(co->id());
            state.rt.try_emplace(co->id());
            state.eht.at(co->id()).push_back(job.id());
            state.rt.at(co->id()).push_back({*exec.co_dist, job.id(), ctx_index});
        }

        if (audit) {
            json rec{{"type", "context"},
                     {"index", ctx_index},
                     {"job", job.id()},
                     {"co_runner", co ? json(co->id()) : json()},
                     {"trials", trials_each},
                     {"job_region", exec.job_region}};
            if (co) rec["co_region"] = exec.co_region;
            audit->records.push_back(std::move(rec));
        }
    }

    // Steps 6-7: detect, update the GAL, merge, drop the entries.
    const auto& results = state.rt.at(job.id());
    std::vector<Distribution> dists;
    dists.reserve(results.size());
    for (const auto& r : results) dists.push_back(r.dist);

    Distribution merged;
    detect::DetectionReport report;
    bool detected = false;
    if (opts.attack_detection && dists.size() >= 3) {
        report = detect::holdout_detect(dists, opts.threshold);
        detected = true;
        std::vector<std::string> gal_added;
        for (int idx : report.attacked) {
            const auto& culprit = results[idx].co_runner;
            if (!culprit.empty() && state.gal.insert(culprit).second) gal_added.push_back(culprit);
        }
        merged = detect::merge_weighted(dists, report, opts.merge);
        if (audit) {
            json rec{{"type", "detection"},
                     {"job", job.id()},
                     {"threshold", report.threshold},
                     {"delta", report.delta.delta},
                     {"votes", report.votes},
                     {"attacked", std::vector<int>(report.attacked.begin(), report.attacked.end())},
                     {"weights", report.normalized_weights},
                     {"gal_added", gal_added},
                     {"co_runners", [&] {
                          std::vector<std::string> ids;
                          for (const auto& r : results) ids.push_back(r.co_runner);
                          return ids;
                      }()}};
            audit->records.push_back(std::move(rec));
        }
    } else {
        merged = detect::merge_counts(dists);
    }
    if (report_out && detected) *report_out = report;

    state.eht.erase(job.id());
    state.rt.erase(job.id());
    state.completed.insert(job.id());
    return merged;
}

RunResult run_schedule(const std::vector<Job>& queue, const Device& dev,
                       const NoiseProfile& profile, const ScheduleOptions& opts, uint64_t seed) {
    RunResult result;
    std::set<std::string> ids;
    for (const auto& job : queue)
        if (!ids.insert(job.id()).second)
            throw SchedulerError("duplicate job id in queue: " + job.id());

    SchedulerState state;
    for (const auto& job : queue) {  // entries exist from the moment jobs enter the queue
        state.eht.try_emplace(job.id());
        state.rt.try_emplace(job.id());
    }

    for (const auto& job : queue) {
        JobOutcome outcome;
        try {
            detect::DetectionReport report;
            outcome.dist = mfcs(job, queue, state, opts, dev, profile, seed, &result.audit,
                                opts.attack_detection ? &report : nullptr);
            if (opts.attack_detection && opts.contexts >= 3) outcome.report = report;
        } catch (const std::exception& e) {
            outcome.failed = true;
            outcome.error = e.what();
            result.audit.records.push_back(
                json{{"type", "job_failure"}, {"job", job.id()}, {"error", e.what()}});
            state.eht.erase(job.id());
            state.rt.erase(job.id());
            state.completed.insert(job.id());
        }
        result.outcomes[job.id()] = std::move(outcome);
    }
    result.final_state = std::move(state);
    return result;
}

RunResult run_isolated(const std::vector<Job>& queue, const Device& dev,
                       const NoiseProfile& profile, uint64_t seed) {
    ScheduleOptions opts;
    opts.contexts = 1;
    opts.policy = Policy::alone;
    opts.attack_detection = false;
    return run_schedule(queue, dev, profile, opts, seed);
}

RunResult run_emp(const std::vector<Job>& queue, const Device& dev, const NoiseProfile& profile,
                  uint64_t seed) {
    ScheduleOptions opts;
    opts.contexts = 1;
    opts.policy = Policy::queue_order;
    opts.attack_detection = false;
    return run_schedule(queue, dev, profile, opts, seed);
}

RunResult run_qontexts(const std::vector<Job>& queue, const Device& dev,
                       const NoiseProfile& profile, int contexts, bool attack_detection,
                       uint64_t seed, double threshold, detect::MergeMode merge) {
    ScheduleOptions opts;
    opts.contexts = contexts;
    opts.policy = Policy::random_unique;
    opts.attack_detection = attack_detection;
    opts.threshold = threshold;
    opts.merge = merge;
    return run_schedule(queue, dev, profile, opts, seed);
}

}  // namespace qontexts::sched
