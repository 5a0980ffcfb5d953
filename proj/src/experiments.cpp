#include "qontexts/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "qontexts/qasm.hpp"
#include "qontexts/rng.hpp"

namespace qontexts::exp {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string fmt(double v, int precision = 6) {
    std::ostringstream out;
    out << std::setprecision(precision) << v;
    return out.str();
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    return parts;
}

}  // namespace

json ExperimentConfig::to_json() const {
    json j;
    j["device"] = device;
    j["custom_topology"] = custom_topology;
    j["calibration"] = calibration;
    j["benchmarks"] = benchmarks;
    j["attackers"] = attackers;
    j["attacker_fraction"] = attacker_fraction;
    j["attack_placement"] = attack_placement;
    j["trials"] = trials;
    j["modes"] = modes;
    j["contexts"] = contexts;
    j["threshold"] = threshold;
    j["merge"] = merge;
    j["seed"] = seed;
    j["out"] = out_dir;
    j["characterize"] = {{"depth", characterize.depth},
                         {"trials", characterize.trials},
                         {"max_pairs", characterize.max_pairs},
                         {"rf_below", characterize.rf_below},
                         {"link_seeds", characterize.link_seeds}};
    j["attack_demo"] = {{"secrets", attack_demo.secrets},
                        {"secret_len", attack_demo.secret_len},
                        {"zkta_qubits", attack_demo.zkta_qubits},
                        {"zkta_depth", attack_demo.zkta_depth},
                        {"disguised", attack_demo.disguised},
                        {"trials", attack_demo.trials}};
    j["latency"] = {{"trials", latency.trials},
                    {"t_trial", latency.t_trial},
                    {"t_wait", latency.t_wait},
                    {"t_load_over_t_wait", latency.t_load_over_t_wait},
                    {"concurrency", latency.concurrency}};
    j["queue_sim"] = {{"loads", queue_sim.loads},
                      {"n_jobs", queue_sim.n_jobs},
                      {"seeds", queue_sim.seeds}};
    j["landscape"] = {{"enabled", landscape.enabled},
                      {"nodes", landscape.nodes},
                      {"grid", landscape.grid},
                      {"trials", landscape.trials}};
    return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    ExperimentConfig c;
    c.device = j.value("device", c.device);
    c.custom_topology = j.value("custom_topology", c.custom_topology);
    c.calibration = j.value("calibration", c.calibration);
    if (j.contains("benchmarks")) c.benchmarks = j.at("benchmarks").get<std::vector<std::string>>();
    if (j.contains("attackers")) c.attackers = j.at("attackers").get<std::vector<std::string>>();
    c.attacker_fraction = j.value("attacker_fraction", c.attacker_fraction);
    if (c.attacker_fraction < 0.0 || c.attacker_fraction > 1.0)
        throw ConfigError("attacker_fraction must lie in [0, 1]");
    c.attack_placement = j.value("attack_placement", c.attack_placement);
    c.trials = j.value("trials", c.trials);
    if (j.contains("modes")) c.modes = j.at("modes").get<std::vector<std::string>>();
    c.contexts = j.value("contexts", c.contexts);
    c.threshold = j.value("threshold", c.threshold);
    c.merge = j.value("merge", c.merge);
    c.seed = j.value("seed", c.seed);
    c.out_dir = j.value("out", c.out_dir);
    if (j.contains("characterize")) {
        const auto& s = j.at("characterize");
        c.characterize.depth = s.value("depth", c.characterize.depth);
        c.characterize.trials = s.value("trials", c.characterize.trials);
        c.characterize.max_pairs = s.value("max_pairs", c.characterize.max_pairs);
        c.characterize.rf_below = s.value("rf_below", c.characterize.rf_below);
        c.characterize.link_seeds = s.value("link_seeds", c.characterize.link_seeds);
    }
    if (j.contains("attack_demo")) {
        const auto& s = j.at("attack_demo");
        c.attack_demo.secrets = s.value("secrets", c.attack_demo.secrets);
        c.attack_demo.secret_len = s.value("secret_len", c.attack_demo.secret_len);
        c.attack_demo.zkta_qubits = s.value("zkta_qubits", c.attack_demo.zkta_qubits);
        c.attack_demo.zkta_depth = s.value("zkta_depth", c.attack_demo.zkta_depth);
        c.attack_demo.disguised = s.value("disguised", c.attack_demo.disguised);
        c.attack_demo.trials = s.value("trials", c.attack_demo.trials);
    }
    if (j.contains("latency")) {
        const auto& s = j.at("latency");
        c.latency.trials = s.value("trials", c.latency.trials);
        c.latency.t_trial = s.value("t_trial", c.latency.t_trial);
        c.latency.t_wait = s.value("t_wait", c.latency.t_wait);
        c.latency.t_load_over_t_wait = s.value("t_load_over_t_wait", c.latency.t_load_over_t_wait);
        c.latency.concurrency = s.value("concurrency", c.latency.concurrency);
    }
    if (j.contains("queue_sim")) {
        const auto& s = j.at("queue_sim");
        if (s.contains("loads")) c.queue_sim.loads = s.at("loads").get<std::vector<double>>();
        c.queue_sim.n_jobs = s.value("n_jobs", c.queue_sim.n_jobs);
        c.queue_sim.seeds = s.value("seeds", c.queue_sim.seeds);
    }
    if (j.contains("landscape")) {
        const auto& s = j.at("landscape");
        c.landscape.enabled = s.value("enabled", c.landscape.enabled);
        c.landscape.nodes = s.value("nodes", c.landscape.nodes);
        c.landscape.grid = s.value("grid", c.landscape.grid);
        c.landscape.trials = s.value("trials", c.landscape.trials);
    }
    return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("bad config JSON: " + std::string(e.what()));
    }
    return from_json(j);
}

analytics::LatencyParams ExperimentConfig::latency_params() const {
    analytics::LatencyParams lp;
    lp.trials = latency.trials;
    lp.t_trial = latency.t_trial;
    lp.t_wait = latency.t_wait;
    lp.t_load = latency.t_load_over_t_wait * latency.t_wait;
    lp.concurrency = latency.concurrency;
    lp.contexts = contexts;
    return lp;
}

namespace {

topology::Device config_device(const ExperimentConfig& cfg) {
    if (cfg.device == "custom") {
        if (cfg.custom_topology.empty()) throw ConfigError("custom device needs custom_topology");
        return topology::make_device_from_file(cfg.custom_topology);
    }
    return topology::make_device(cfg.device);
}

sim::CalibrationFixture config_calibration(const ExperimentConfig& cfg) {
    if (cfg.calibration.empty()) return sim::load_default_calibration();
    return sim::load_calibration(cfg.calibration);
}

detect::MergeMode merge_mode(const std::string& name) {
    if (name == "as_written") return detect::MergeMode::as_written;
    if (name == "inverse_noise") return detect::MergeMode::inverse_noise;
    throw ConfigError("unknown merge mode: " + name);
}

circuit::Graph ring_graph(int n) {
    circuit::Graph g;
    g.n_nodes = n;
    for (int i = 0; i < n; ++i) g.edges.emplace_back(i, (i + 1) % n, 1.0);
    return g;
}

}  // namespace

BenchEntry make_benchmark(const std::string& spec, long trials) {
    BenchEntry entry;
    entry.spec = spec;
    entry.job.trials = trials;
    entry.job.owner = "user";

    auto ends_with = [](const std::string& s, const std::string& suffix) {
        return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
    };

    std::string body = spec;
    if (body.rfind("file:", 0) == 0) body = body.substr(5);
    if (ends_with(body, ".qasm")) {
        std::ifstream in(body);
        if (!in) throw ConfigError("benchmark file does not exist: " + body);
        std::stringstream buf;
        buf << in.rdbuf();
        entry.job.program = circuit::parse_qasm(buf.str());
        entry.job.program.id = fs::path(body).stem().string();
        return entry;
    }

    auto parts = split(spec, ':');
    const std::string& kind = parts[0];
    auto arg_int = [&](size_t i, int fallback) {
        return i < parts.size() && !parts[i].empty() ? std::stoi(parts[i]) : fallback;
    };

    if (kind == "ghz") {
        entry.job.program = circuit::gen_ghz(arg_int(1, 9));
    } else if (kind == "bv") {
        if (parts.size() < 2) throw ConfigError("bv spec needs a secret, e.g. bv:1101");
        entry.job.program = circuit::gen_bv(parts[1]);
        entry.single_answer = true;
        entry.expected_answer = parts[1];
    } else if (kind == "qaoa_ring") {
        int n = arg_int(1, 8);
        int p = arg_int(2, 1);
        std::vector<double> gamma(p, 0.6), beta(p, 0.35);
        entry.job.program = circuit::gen_qaoa_maxcut(ring_graph(n), p, gamma, beta);
        entry.job.program.id = "qaoa-ring" + std::to_string(n) + "p" + std::to_string(p);
    } else if (kind == "zkta") {
        entry.job.program = circuit::gen_zkta(arg_int(1, 10), arg_int(2, 16));
        entry.job.is_attacker_ground_truth = true;
        entry.job.owner = "adversary";
    } else if (kind == "zkta_qaoa") {
        auto raw = circuit::gen_zkta(arg_int(1, 10), arg_int(2, 16), 2);
        auto [disguised, graph] = circuit::disguise_as_qaoa(raw);
        (void)graph;
        entry.job.program = std::move(disguised);
        entry.job.is_attacker_ground_truth = true;
        entry.job.owner = "adversary";
    } else {
        throw ConfigError("unknown benchmark spec: " + spec);
    }
    return entry;
}

std::vector<BenchEntry> build_queue(const ExperimentConfig& cfg) {
    std::vector<std::string> benign = cfg.benchmarks;
    if (benign.empty())
        benign = {"ghz:9",  "bv:11010010", "qaoa_ring:8", "ghz:7",     "bv:1101001",
                  "ghz:10", "bv:110100",   "qaoa_ring:6", "ghz:6",     "bv:10111",
                  "ghz:8",  "bv:1011011",  "qaoa_ring:7", "bv:101101", "ghz:5",
                  "bv:11011011"};

    std::vector<std::string> attackers = cfg.attackers;
    if (attackers.empty()) {
        int total = static_cast<int>(std::lround(benign.size() / (1.0 - cfg.attacker_fraction)));
        int n_attack = std::max(0, total - static_cast<int>(benign.size()));
        for (int i = 0; i < n_attack; ++i)
            attackers.push_back(i % 2 == 0 ? "zkta:10:16" : "zkta:8:16");
    }

    std::vector<BenchEntry> queue;
    auto add = [&](const std::string& spec) {
        auto entry = make_benchmark(spec, cfg.trials);
        // make ids unique across the queue
        std::string base = entry.job.program.id;
        int k = 1;
        auto taken = [&](const std::string& id) {
            return std::any_of(queue.begin(), queue.end(),
                               [&](const BenchEntry& e) { return e.job.id() == id; });
        };
        while (taken(entry.job.program.id))
            entry.job.program.id = base + "#" + std::to_string(++k);
        queue.push_back(std::move(entry));
    };

    if (cfg.attack_placement == "paired") {
        // attackers sit next to a victim so fixed pairing co-locates them
        size_t ai = 0;
        for (size_t bi = 0; bi < benign.size(); ++bi) {
            add(benign[bi]);
            if (ai < attackers.size()) add(attackers[ai++]);
        }
        while (ai < attackers.size()) add(attackers[ai++]);
    } else if (cfg.attack_placement == "shuffled") {
        std::vector<std::string> all = benign;
        all.insert(all.end(), attackers.begin(), attackers.end());
        rng::Stream stream(rng::mix(cfg.seed, 0x73687566ULL));
        for (size_t i = all.size(); i > 1; --i) std::swap(all[i - 1], all[stream.below(i)]);
        for (const auto& spec : all) add(spec);
    } else {
        throw ConfigError("unknown attack_placement: " + cfg.attack_placement);
    }
    return queue;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    for (size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << "\n";
    }
}

void write_outputs(const ExperimentConfig& cfg, const CommandResult& result) {
    fs::create_directories(cfg.out_dir);
    std::ofstream rep(cfg.out_dir + "/report.json");
    rep << result.report.dump(1) << "\n";
    std::ofstream sum(cfg.out_dir + "/summary.txt");
    sum << result.summary;
}

// --- characterize ---------------------------------------------------------

CommandResult cmd_characterize(const ExperimentConfig& cfg) {
    auto dev = config_device(cfg);
    auto calib = config_calibration(cfg);
    auto profile = sim::gen_noise_profile(dev, cfg.seed, calib.params);
    fs::create_directories(cfg.out_dir);

    const int depth = cfg.characterize.depth;
    const long trials = cfg.characterize.trials;

    std::vector<std::vector<std::string>> rows;
    std::map<int, std::pair<double, int>> by_hop;  // hop -> (sum RF, count)
    int affected = 0;
    int total_pairs = 0;
    for (size_t i = 0; i < dev.links.size(); ++i) {
        for (size_t j = 0; j < dev.links.size(); ++j) {
            if (i == j) continue;
            const auto& victim = dev.links[i];
            const auto& attack = dev.links[j];
            if (j < i) continue;  // unordered pairs, victim = lower index
            if (victim.a == attack.a || victim.a == attack.b || victim.b == attack.a ||
                victim.b == attack.b)
                continue;  // overlapping links cannot run concurrently
            if (cfg.characterize.max_pairs > 0 && total_pairs >= cfg.characterize.max_pairs) break;
            ++total_pairs;

            auto [ub1, ub2] = circuit::gen_microbenchmarks(victim, {attack}, depth);
            auto m1 = circuit::map_microbenchmark(ub1, victim, {});
            auto m2 = circuit::map_microbenchmark(ub2, victim, {attack});
            auto ideal = sim::simulate_ideal(ub1);
            uint64_t pair_seed = rng::mix(cfg.seed, i, j);
            auto iso = sim::sample_noisy({m1}, profile, trials, pair_seed)[0];
            auto shared = sim::sample_noisy({m2}, profile, trials, rng::mix(pair_seed, 1))[0];
            double rf = sim::relative_fidelity(iso, shared, ideal);

            int hop = topology::hop_distance(dev, victim, attack);
            double chi = profile.crosstalk(victim, attack);
            if (rf < cfg.characterize.rf_below) ++affected;
            auto& agg = by_hop[hop];
            agg.first += rf;
            agg.second += 1;
            rows.push_back({std::to_string(victim.a) + "-" + std::to_string(victim.b),
                            std::to_string(attack.a) + "-" + std::to_string(attack.b),
                            std::to_string(hop), fmt(chi), fmt(rf)});
        }
    }
    write_csv(cfg.out_dir + "/rf_vs_hop.csv", {"victim", "attack", "hop", "chi", "rf"}, rows);

    // link-count scaling on the calibration scenario links
    std::vector<std::vector<std::string>> link_rows;
    std::vector<double> mean_rf_by_links;
    for (int k = 1; k <= static_cast<int>(calib.attack_links.size()); ++k) {
        auto scen = sim::scenario_profile(calib, k);
        std::vector<topology::Link> attack(calib.attack_links.begin(),
                                           calib.attack_links.begin() + k);
        auto [ub1, ub2] = circuit::gen_microbenchmarks(calib.victim_link, attack, calib.depth);
        auto m1 = circuit::map_microbenchmark(ub1, calib.victim_link, {});
        auto m2 = circuit::map_microbenchmark(ub2, calib.victim_link, attack);
        auto ideal = sim::simulate_ideal(ub1);
        double sum = 0.0;
        double worst = 2.0;
        for (int s = 0; s < cfg.characterize.link_seeds; ++s) {
            uint64_t seed_k = rng::mix(cfg.seed, 0x6c6eULL + k, s);
            auto iso = sim::sample_noisy({m1}, scen, trials, seed_k)[0];
            auto shared = sim::sample_noisy({m2}, scen, trials, rng::mix(seed_k, 1))[0];
            double rf = sim::relative_fidelity(iso, shared, ideal);
            sum += rf;
            worst = std::min(worst, rf);
        }
        double mean = sum / cfg.characterize.link_seeds;
        mean_rf_by_links.push_back(mean);
        link_rows.push_back({std::to_string(k + 1), fmt(mean), fmt(worst)});
    }
    write_csv(cfg.out_dir + "/rf_vs_links.csv", {"links", "mean_rf", "min_rf"}, link_rows);

    CommandResult result;
    result.report["command"] = "characterize";
    result.report["config"] = cfg.to_json();
    result.report["pairs"] = total_pairs;
    result.report["fraction_rf_below"] =
        total_pairs ? static_cast<double>(affected) / total_pairs : 0.0;
    json hop_means = json::object();
    for (const auto& [hop, agg] : by_hop) hop_means[std::to_string(hop)] = agg.first / agg.second;
    result.report["mean_rf_by_hop"] = hop_means;
    result.report["mean_rf_by_links"] = mean_rf_by_links;
    result.report["chi_active_fraction"] =
        profile.active_fraction(dev.links.size() * (dev.links.size() - 1) / 2);
    result.report["csv"] = {cfg.out_dir + "/rf_vs_hop.csv", cfg.out_dir + "/rf_vs_links.csv"};
    result.summary = render_report(result.report);
    return result;
}

// --- attack-demo -----------------------------------------------------------

CommandResult cmd_attack_demo(const ExperimentConfig& cfg) {
    auto dev = config_device(cfg);
    auto calib = config_calibration(cfg);
    auto profile = sim::gen_noise_profile(dev, cfg.seed, calib.params);

    rng::Stream secrets_stream(rng::mix(cfg.seed, 0x73656372ULL));
    json per_secret = json::array();
    int successes = 0;
    int ties = 0;
    for (int s = 0; s < cfg.attack_demo.secrets; ++s) {
        std::string secret;
        do {
            secret.clear();
            for (int b = 0; b < cfg.attack_demo.secret_len; ++b)
                secret.push_back(secrets_stream.bernoulli(0.5) ? '1' : '0');
        } while (secret.find('1') == std::string::npos);

        BenchEntry victim;
        victim.job.program = circuit::gen_bv(secret);
        victim.job.trials = cfg.attack_demo.trials;

        sched::Job attacker_job;
        if (cfg.attack_demo.disguised) {
            auto raw = circuit::gen_zkta(cfg.attack_demo.zkta_qubits, cfg.attack_demo.zkta_depth, 2);
            attacker_job.program = circuit::disguise_as_qaoa(raw).first;
        } else {
            attacker_job.program =
                circuit::gen_zkta(cfg.attack_demo.zkta_qubits, cfg.attack_demo.zkta_depth);
        }
        attacker_job.trials = cfg.attack_demo.trials;
        attacker_job.is_attacker_ground_truth = true;

        std::vector<sched::Job> queue{victim.job, attacker_job};
        uint64_t run_seed = rng::mix(cfg.seed, 0x6276ULL, s);
        auto iso = sched::run_isolated(queue, dev, profile, run_seed);
        auto emp = sched::run_emp(queue, dev, profile, rng::mix(run_seed, 1));
        auto ideal = sim::simulate_ideal(victim.job.program);

        const auto& iso_dist = iso.outcomes.at(victim.job.id()).dist;
        const auto& emp_dist = emp.outcomes.at(victim.job.id()).dist;
        auto verdict =
            detect::attack_success(iso_dist, emp_dist, ideal, detect::SuccessKind::single_answer);
        if (verdict.success) ++successes;
        if (verdict.tie_broken) ++ties;
        double rf = sim::relative_fidelity(iso_dist, emp_dist, ideal);
        per_secret.push_back({{"secret", secret},
                              {"iso_peak", iso_dist.argmax()},
                              {"shared_peak", emp_dist.argmax()},
                              {"relative_fidelity", rf},
                              {"success", verdict.success},
                              {"tie_broken", verdict.tie_broken}});
    }

    CommandResult result;
    result.report["command"] = "attack-demo";
    result.report["config"] = cfg.to_json();
    result.report["secrets"] = per_secret;
    result.report["success_rate"] =
        cfg.attack_demo.secrets ? static_cast<double>(successes) / cfg.attack_demo.secrets : 0.0;
    result.report["ties"] = ties;
    result.summary = render_report(result.report);
    return result;
}

// --- run -------------------------------------------------------------------

CommandResult cmd_run(const ExperimentConfig& cfg) {
    auto dev = config_device(cfg);
    auto calib = config_calibration(cfg);
    auto profile = sim::gen_noise_profile(dev, cfg.seed, calib.params);
    fs::create_directories(cfg.out_dir);

    auto queue_entries = build_queue(cfg);
    std::vector<sched::Job> queue;
    for (const auto& e : queue_entries) queue.push_back(e.job);

    std::map<std::string, sim::Distribution> ideals;
    for (const auto& e : queue_entries) ideals[e.job.id()] = sim::simulate_ideal(e.job.program);

    auto lp = cfg.latency_params();

    // isolated first: the fidelity reference for every other mode
    auto iso = sched::run_isolated(queue, dev, profile, rng::mix(cfg.seed, 0x69736fULL));

    json bench_rows = json::array();
    json mode_summary = json::object();
    bool any_failed = false;
    for (const auto& [id, outcome] : iso.outcomes) {
        (void)id;
        if (outcome.failed) any_failed = true;
    }

    std::map<std::string, sched::RunResult> mode_results;
    for (const auto& mode : cfg.modes) {
        if (mode == "isolated") {
            mode_results.emplace(mode, std::move(iso));
            continue;
        }
        uint64_t mode_seed = rng::mix(cfg.seed, 0x6d6f6465ULL,
                                      std::find(cfg.modes.begin(), cfg.modes.end(), mode) -
                                          cfg.modes.begin());
        if (mode == "emp") {
            mode_results.emplace(mode, sched::run_emp(queue, dev, profile, mode_seed));
        } else if (mode == "qontexts") {
            mode_results.emplace(mode, sched::run_qontexts(queue, dev, profile, cfg.contexts, false,
                                                           mode_seed, cfg.threshold,
                                                           merge_mode(cfg.merge)));
        } else if (mode == "qontexts_ad") {
            mode_results.emplace(mode, sched::run_qontexts(queue, dev, profile, cfg.contexts, true,
                                                           mode_seed, cfg.threshold,
                                                           merge_mode(cfg.merge)));
        } else {
            throw ConfigError("unknown mode: " + mode);
        }
        mode_results.at(mode).audit.dump_jsonl(cfg.out_dir + "/audit_" + mode + ".jsonl");
    }
    if (!mode_results.count("isolated")) mode_results.emplace("isolated", std::move(iso));
    const auto& iso_ref = mode_results.at("isolated");

    std::map<std::string, double> mean_rf;
    std::map<std::string, int> rf_counts;
    for (const auto& entry : queue_entries) {
        const std::string& id = entry.job.id();
        json row;
        row["id"] = id;
        row["spec"] = entry.spec;
        row["qubits"] = entry.job.program.n_qubits;
        row["attacker"] = entry.job.is_attacker_ground_truth;
        const auto& iso_out = iso_ref.outcomes.at(id);
        if (iso_out.failed) {
            row["error"] = iso_out.error;
            any_failed = true;
            bench_rows.push_back(row);
            continue;
        }
        for (const auto& mode : cfg.modes) {
            if (!mode_results.count(mode)) continue;
            const auto& out = mode_results.at(mode).outcomes.at(id);
            if (out.failed) {
                row[mode] = {{"error", out.error}};
                any_failed = true;
                continue;
            }
            json cell;
            double rf = sim::relative_fidelity(iso_out.dist, out.dist, ideals.at(id));
            cell["relative_fidelity"] = rf;
            if (!entry.job.is_attacker_ground_truth) {
                auto kind = entry.single_answer ? detect::SuccessKind::single_answer
                                                : detect::SuccessKind::distributional;
                auto verdict = detect::attack_success(iso_out.dist, out.dist, ideals.at(id), kind);
                cell["attacked"] = verdict.success;
                if (verdict.tie_broken) cell["tie_broken"] = true;
                mean_rf[mode] += rf;
                rf_counts[mode] += 1;
            }
            row[mode] = cell;
        }
        bench_rows.push_back(row);
    }

    for (const auto& mode : cfg.modes) {
        analytics::LatencyParams mode_lp = lp;
        json summary;
        if (rf_counts.count(mode) && rf_counts[mode])
            summary["mean_relative_fidelity"] = mean_rf[mode] / rf_counts[mode];
        summary["throughput"] =
            analytics::throughput(analytics::mode_from_string(mode), mode_lp);
        mode_summary[mode] = summary;
    }

    CommandResult result;
    result.report["command"] = "run";
    result.report["config"] = cfg.to_json();
    result.report["benchmarks"] = bench_rows;
    result.report["modes"] = mode_summary;
    result.report["failed"] = any_failed;
    result.exit_code = any_failed ? 1 : 0;
    result.summary = render_report(result.report);
    return result;
}

// --- analytics -------------------------------------------------------------

CommandResult cmd_analytics(const ExperimentConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    analytics::ResilienceParams rp;  // published defaults
    rp.contexts = cfg.contexts;

    analytics::ResilienceParams moderate = rp;
    moderate.beta = 0.5;
    analytics::ResilienceParams strong = rp;
    strong.beta = 0.75;

    double baseline = analytics::p_baseline(rp);
    double p_moderate = analytics::p_at_least(moderate);
    double p_strong = analytics::p_at_least(strong);

    // resilience vs attacker share
    std::vector<std::vector<std::string>> res_rows;
    for (int pct = 5; pct <= 95; pct += 5) {
        analytics::ResilienceParams r = rp;
        r.attacker_programs = pct;
        r.total_programs = 100;
        r.beta = 0.5;
        double pm = analytics::p_at_least(r);
        r.beta = 0.75;
        double ps = analytics::p_at_least(r);
        res_rows.push_back({fmt(pct / 100.0), fmt(analytics::p_baseline(r)), "baseline"});
        res_rows.push_back({fmt(pct / 100.0), fmt(pm), "moderate"});
        res_rows.push_back({fmt(pct / 100.0), fmt(ps), "strong"});
    }
    write_csv(cfg.out_dir + "/resilience.csv", {"kn", "p", "model"}, res_rows);

    // resilience vs context count
    std::vector<std::vector<std::string>> ctx_rows;
    for (double kn : {0.2, 0.8}) {
        for (int c = 1; c <= 32; ++c) {
            analytics::ResilienceParams r = rp;
            r.attacker_programs = static_cast<int>(std::lround(kn * 100));
            r.total_programs = 100;
            r.contexts = c;
            r.beta = 0.75;
            ctx_rows.push_back({std::to_string(c), fmt(analytics::p_at_least(r)), fmt(kn)});
        }
    }
    write_csv(cfg.out_dir + "/resilience_vs_contexts.csv", {"contexts", "p_strong", "kn"}, ctx_rows);

    analytics::ResilienceParams target = rp;
    target.beta = 0.75;
    analytics::ResilienceParams widened = target;
    widened.attacker_programs = 80;
    int needed_contexts = analytics::min_contexts(target, widened);

    // throughput curves
    auto lp = cfg.latency_params();
    std::vector<std::vector<std::string>> tp_rows;
    for (int r = 1; r <= 20; ++r) {
        analytics::LatencyParams l = lp;
        l.t_load = r * l.t_wait;
        tp_rows.push_back({std::to_string(r), fmt(analytics::throughput(analytics::Mode::emp, l)),
                           "emp"});
        tp_rows.push_back(
            {std::to_string(r), fmt(analytics::throughput(analytics::Mode::qontexts, l)),
             "qontexts"});
    }
    write_csv(cfg.out_dir + "/throughput_vs_load_ratio.csv", {"t_load_over_t_wait", "throughput", "mode"},
              tp_rows);

    std::vector<std::vector<std::string>> tpc_rows;
    for (double ratio : {1.0, 20.0}) {
        for (int c = 1; c <= 64; ++c) {
            analytics::LatencyParams l = lp;
            l.t_load = ratio * l.t_wait;
            l.contexts = c;
            tpc_rows.push_back({std::to_string(c),
                                fmt(analytics::throughput(analytics::Mode::qontexts, l)),
                                fmt(ratio)});
        }
    }
    write_csv(cfg.out_dir + "/throughput_vs_contexts.csv",
              {"contexts", "throughput", "t_load_over_t_wait"}, tpc_rows);

    // queue simulation
    std::vector<std::vector<std::string>> q_rows;
    for (double load : cfg.queue_sim.loads) {
        for (int s = 0; s < cfg.queue_sim.seeds; ++s) {
            for (auto mode : {analytics::Mode::isolated, analytics::Mode::emp,
                              analytics::Mode::qontexts}) {
                analytics::QueueParams qp;
                qp.arrival_rate = load;
                qp.n_jobs = cfg.queue_sim.n_jobs;
                qp.mode = mode;
                qp.seed = rng::mix(cfg.seed, static_cast<uint64_t>(load * 1000), s);
                auto stats = analytics::simulate_queue(qp, lp);
                q_rows.push_back({fmt(load), fmt(stats.mean_completion),
                                  analytics::mode_to_string(mode), std::to_string(s),
                                  stats.divergent ? "1" : "0"});
            }
        }
    }
    write_csv(cfg.out_dir + "/queue_sim.csv", {"load", "mean_completion", "mode", "seed", "divergent"},
              q_rows);

    CommandResult result;
    result.report["command"] = "analytics";
    result.report["config"] = cfg.to_json();
    result.report["p_baseline"] = baseline;
    result.report["p_moderate"] = p_moderate;
    result.report["p_strong"] = p_strong;
    result.report["resilience_moderate_x"] = baseline / p_moderate;
    result.report["resilience_strong_x"] = baseline / p_strong;
    result.report["contexts_for_kn_0.8"] = needed_contexts;
    result.report["csv"] = {cfg.out_dir + "/resilience.csv",
                            cfg.out_dir + "/resilience_vs_contexts.csv",
                            cfg.out_dir + "/throughput_vs_load_ratio.csv",
                            cfg.out_dir + "/throughput_vs_contexts.csv",
                            cfg.out_dir + "/queue_sim.csv"};

    if (cfg.landscape.enabled) {
        auto dev = config_device(cfg);
        auto calib = config_calibration(cfg);
        auto profile = sim::gen_noise_profile(dev, cfg.seed, calib.params);
        auto graph = ring_graph(cfg.landscape.nodes);
        std::vector<double> gammas, betas;
        for (int i = 0; i < cfg.landscape.grid; ++i) {
            gammas.push_back(3.14159265358979 * (i + 1) / (cfg.landscape.grid + 1));
            betas.push_back(3.14159265358979 * 0.5 * (i + 1) / (cfg.landscape.grid + 1));
        }
        analytics::LandscapeExec exec;
        exec.dev = &dev;
        exec.profile = &profile;
        exec.trials = cfg.landscape.trials;
        exec.seed = rng::mix(cfg.seed, 0x6c616eULL);

        std::vector<std::vector<std::string>> land_rows;
        auto emit = [&](const char* mode, const std::vector<std::vector<double>>& grid) {
            for (size_t gi = 0; gi < gammas.size(); ++gi)
                for (size_t bi = 0; bi < betas.size(); ++bi)
                    land_rows.push_back(
                        {fmt(gammas[gi]), fmt(betas[bi]), fmt(grid[gi][bi]), mode});
        };
        exec.kind = analytics::LandscapeExec::Kind::isolated;
        emit("isolated", analytics::landscape_sweep(graph, gammas, betas, exec));
        exec.kind = analytics::LandscapeExec::Kind::emp_zkta;
        exec.attacker = circuit::gen_zkta(cfg.attack_demo.zkta_qubits, cfg.attack_demo.zkta_depth);
        emit("emp_zkta", analytics::landscape_sweep(graph, gammas, betas, exec));
        write_csv(cfg.out_dir + "/landscape.csv", {"gamma", "beta", "expected_cut", "mode"},
                  land_rows);
        result.report["csv"].push_back(cfg.out_dir + "/landscape.csv");
    }

    result.summary = render_report(result.report);
    return result;
}

// --- report rendering ------------------------------------------------------

std::string render_report(const json& report) {
    std::ostringstream out;
    std::string cmd = report.value("command", "?");
    out << "=== " << cmd << " ===\n";
    if (cmd == "characterize") {
        out << "link pairs profiled: " << report["pairs"] << "\n";
        out << "fraction with RF below threshold: " << fmt(report["fraction_rf_below"], 4) << "\n";
        out << "chi-active fraction: " << fmt(report["chi_active_fraction"], 4) << "\n";
        out << "mean RF by hop distance:\n";
        for (const auto& [hop, rf] : report["mean_rf_by_hop"].items())
            out << "  d=" << hop << ": " << fmt(rf.get<double>(), 4) << "\n";
        out << "mean RF by concurrent links:";
        for (const auto& rf : report["mean_rf_by_links"]) out << " " << fmt(rf.get<double>(), 4);
        out << "\n";
    } else if (cmd == "attack-demo") {
        out << std::left << std::setw(14) << "secret" << std::setw(12) << "iso_peak"
            << std::setw(12) << "shared_peak" << std::setw(8) << "rf" << "success\n";
        for (const auto& row : report["secrets"]) {
            out << std::left << std::setw(14) << row["secret"].get<std::string>() << std::setw(12)
                << row["iso_peak"].get<std::string>() << std::setw(12)
                << row["shared_peak"].get<std::string>() << std::setw(8)
                << fmt(row["relative_fidelity"].get<double>(), 3)
                << (row["success"].get<bool>() ? "yes" : "no") << "\n";
        }
        out << "success rate: " << fmt(report["success_rate"].get<double>(), 3) << "\n";
    } else if (cmd == "run") {
        out << std::left << std::setw(18) << "benchmark" << std::setw(8) << "qubits";
        std::vector<std::string> modes;
        for (const auto& [mode, s] : report["modes"].items()) {
            (void)s;
            modes.push_back(mode);
            out << std::setw(16) << (mode + " RF");
        }
        out << "\n";
        for (const auto& row : report["benchmarks"]) {
            if (row.value("attacker", false)) continue;
            out << std::left << std::setw(18) << row["id"].get<std::string>() << std::setw(8)
                << row["qubits"].get<int>();
            for (const auto& mode : modes) {
                if (row.contains(mode) && row[mode].contains("relative_fidelity")) {
                    std::string cell = fmt(row[mode]["relative_fidelity"].get<double>(), 3);
                    if (row[mode].value("attacked", false)) cell += "*";
                    out << std::setw(16) << cell;
                } else {
                    out << std::setw(16) << "-";
                }
            }
            out << "\n";
        }
        out << "(* = attack success criterion met)\n";
        for (const auto& [mode, s] : report["modes"].items()) {
            out << mode << ": throughput " << fmt(s["throughput"].get<double>(), 4);
            if (s.contains("mean_relative_fidelity"))
                out << ", mean RF " << fmt(s["mean_relative_fidelity"].get<double>(), 4);
            out << "\n";
        }
    } else if (cmd == "analytics") {
        out << "p_baseline = " << fmt(report["p_baseline"].get<double>(), 6) << "\n";
        out << "p_moderate = " << fmt(report["p_moderate"].get<double>(), 6) << "\n";
        out << "p_strong   = " << fmt(report["p_strong"].get<double>(), 6) << "\n";
        out << "resilience: " << fmt(report["resilience_moderate_x"].get<double>(), 6) << "x / "
            << fmt(report["resilience_strong_x"].get<double>(), 6) << "x\n";
        out << "contexts needed at 80% attackers: " << report["contexts_for_kn_0.8"] << "\n";
    }
    return out.str();
}

}  // namespace qontexts::exp
