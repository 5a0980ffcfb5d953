#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "qontexts/analytics.hpp"
#include "qontexts/scheduler.hpp"

namespace qontexts::exp {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Single resolved experiment configuration. Loaded from JSON, overridden
/// by CLI flags, and embedded verbatim in every report so a report can be
/// reproduced bit-identically from itself.
struct ExperimentConfig {
    std::string device = "hanoi27";
    std::string custom_topology;
    std::string calibration;  // empty: fixtures/calibration.json

    std::vector<std::string> benchmarks;  // benign queue entries (specs or .qasm paths)
    std::vector<std::string> attackers;   // attacker entries; sized by attacker_fraction when empty
    double attacker_fraction = 0.2;
    std::string attack_placement = "paired";  // attackers adjacent to victims, or "shuffled"

    long trials = 8000;
    std::vector<std::string> modes = {"isolated", "emp", "qontexts", "qontexts_ad"};
    int contexts = 8;
    double threshold = 0.3;
    std::string merge = "inverse_noise";
    uint64_t seed = 1;
    std::string out_dir = "out";

    struct Characterize {
        int depth = 8;
        long trials = 20000;
        int max_pairs = 0;      // 0: all unordered link pairs
        double rf_below = 0.99; // "affected" threshold on measured RF
        int link_seeds = 5;     // seeds for the link-count sweep
    } characterize;

    struct AttackDemo {
        int secrets = 10;
        int secret_len = 8;
        int zkta_qubits = 10;
        int zkta_depth = 16;
        bool disguised = false;
        long trials = 8000;
    } attack_demo;

    struct Latency {
        long trials = 10000;
        double t_trial = 100e-6;
        double t_wait = 250e-6;
        double t_load_over_t_wait = 1.0;
        int concurrency = 2;
    } latency;

    struct QueueSim {
        std::vector<double> loads = {2, 3, 4, 5, 6, 7, 8, 9, 10};
        int n_jobs = 2000;
        int seeds = 10;
    } queue_sim;

    struct Landscape {
        bool enabled = false;
        int nodes = 6;
        int grid = 5;
        long trials = 2000;
    } landscape;

    nlohmann::json to_json() const;
    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig load(const std::string& path);

    analytics::LatencyParams latency_params() const;
};

/// A queue entry built from a benchmark spec string.
struct BenchEntry {
    sched::Job job;
    std::string spec;
    bool single_answer = false;        // peak-readout benchmark (BV)
    std::string expected_answer;       // ideal argmax for single-answer kinds
};

/// Builds a Program (plus metadata) from a spec such as "ghz:9",
/// "bv:110101", "qaoa_ring:8", "zkta:10:16", "zkta_qaoa:8:8" or a .qasm
/// path.
BenchEntry make_benchmark(const std::string& spec, long trials);

/// Assembles the experiment queue: the configured benign benchmarks plus
/// attackers (defaulted from attacker_fraction), placed per
/// attack_placement. Entry ids are made unique.
std::vector<BenchEntry> build_queue(const ExperimentConfig& cfg);

struct CommandResult {
    nlohmann::json report;
    std::string summary;  // human-readable
    int exit_code = 0;
};

CommandResult cmd_characterize(const ExperimentConfig& cfg);
CommandResult cmd_attack_demo(const ExperimentConfig& cfg);
CommandResult cmd_run(const ExperimentConfig& cfg);
CommandResult cmd_analytics(const ExperimentConfig& cfg);

/// Renders the human summary for a previously written report.json.
std::string render_report(const nlohmann::json& report);

/// Writes report.json and summary.txt into cfg.out_dir (creating it).
void write_outputs(const ExperimentConfig& cfg, const CommandResult& result);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

}  // namespace qontexts::exp
