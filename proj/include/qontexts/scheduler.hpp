#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "qontexts/detection.hpp"
#include "qontexts/noise.hpp"
#include "qontexts/simulator.hpp"

namespace qontexts::sched {

using circuit::MappedProgram;
using circuit::Program;
using sim::Distribution;
using sim::NoiseProfile;
using topology::Device;

struct SchedulerError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Job {
    Program program;
    long trials = 8000;  // T
    std::string owner;
    // Hidden from the scheduler; only evaluation code may look at it.
    bool is_attacker_ground_truth = false;

    const std::string& id() const { return program.id; }
};

/// One completed context from a program's point of view.
struct ContextResult {
    Distribution dist;
    std::string co_runner;  // empty when the program ran alone
    int context_index = -1; // global context counter
};

/// EHT / RT / GAL bookkeeping.
struct SchedulerState {
    std::map<std::string, std::vector<std::string>> eht;
    std::map<std::string, std::vector<ContextResult>> rt;
    std::set<std::string> gal;
    std::set<std::string> completed;
    int next_context_index = 0;
};

enum class Policy {
    alone,        // isolated execution
    queue_order,  // fixed pairing with the next unfinished job (EMP)
    random_unique // MFCS random selection of a fresh co-runner
};

struct ScheduleOptions {
    int contexts = 8;  // C
    bool attack_detection = false;
    double threshold = 0.3;
    detect::MergeMode merge = detect::MergeMode::inverse_noise;
    Policy policy = Policy::random_unique;
    int buffer = 1;
    // Fixture hook: pins the co-runner for specific context ordinals of a
    // job (by id). Entries bypass uniqueness and GAL checks.
    std::map<std::string, std::vector<std::string>> forced_pairs;
};

struct JobOutcome {
    Distribution dist;
    bool failed = false;
    std::string error;
    std::optional<detect::DetectionReport> report;
};

struct AuditLog {
    std::vector<nlohmann::json> records;

    void dump_jsonl(const std::string& path) const;
    std::string to_jsonl() const;
};

struct RunResult {
    std::map<std::string, JobOutcome> outcomes;
    AuditLog audit;
    SchedulerState final_state;  // GAL persists here after the run
};

/// Aligns two mapped programs layer by layer, inserting idle layers into
/// the second program whenever both would run CX gates on physical links
/// at hop distance <= 1 in the same layer.
void stagger_one_hop_cx(const Device& dev, const MappedProgram& first, MappedProgram& second);

/// Runs one program over C contexts (Steps 1-7): pick a fresh co-runner
/// not in the EHT entry or the GAL, update both EHT sides, execute
/// T/C trials, record RT, then detect, merge, update the GAL, and drop
/// the completed entries. Returns the final merged distribution.
Distribution mfcs(const Job& job, const std::vector<Job>& queue, SchedulerState& state,
                  const ScheduleOptions& opts, const Device& dev, const NoiseProfile& profile,
                  uint64_t seed, AuditLog* audit = nullptr,
                  detect::DetectionReport* report_out = nullptr);

/// Drives mfcs over every job in the queue. The shared code path behind
/// all modes below.
RunResult run_schedule(const std::vector<Job>& queue, const Device& dev,
                       const NoiseProfile& profile, const ScheduleOptions& opts, uint64_t seed);

RunResult run_isolated(const std::vector<Job>& queue, const Device& dev,
                       const NoiseProfile& profile, uint64_t seed);

RunResult run_emp(const std::vector<Job>& queue, const Device& dev, const NoiseProfile& profile,
                  uint64_t seed);

RunResult run_qontexts(const std::vector<Job>& queue, const Device& dev,
                       const NoiseProfile& profile, int contexts, bool attack_detection,
                       uint64_t seed, double threshold = 0.3,
                       detect::MergeMode merge = detect::MergeMode::inverse_noise);

}  // namespace qontexts::sched
