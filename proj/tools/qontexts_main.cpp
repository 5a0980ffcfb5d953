#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qontexts/experiments.hpp"

using qontexts::exp::CommandResult;
using qontexts::exp::ExperimentConfig;

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    std::string modes_csv;
    std::string merge;
    uint64_t seed = 0;
    int contexts = 0;
    double threshold = -1.0;
    bool seed_set = false, out_set = false, modes_set = false, contexts_set = false,
         threshold_set = false, merge_set = false;
};

void add_common(CLI::App* app, CommonFlags& flags) {
    app->add_option("--config", flags.config_path, "JSON config file");
    app->add_option("--seed", flags.seed, "run seed")->each([&](const std::string&) {
        flags.seed_set = true;
    });
    app->add_option("--out", flags.out_dir, "output directory")->each([&](const std::string&) {
        flags.out_set = true;
    });
    app->add_option("--mode", flags.modes_csv, "comma-separated mode list")
        ->each([&](const std::string&) { flags.modes_set = true; });
    app->add_option("--contexts", flags.contexts, "contexts per program")
        ->each([&](const std::string&) { flags.contexts_set = true; });
    app->add_option("--threshold", flags.threshold, "attack detection threshold")
        ->each([&](const std::string&) { flags.threshold_set = true; });
    app->add_option("--merge", flags.merge, "merge mode: as_written | inverse_noise")
        ->each([&](const std::string&) { flags.merge_set = true; });
}

ExperimentConfig resolve(const CommonFlags& flags) {
    ExperimentConfig cfg;
    if (!flags.config_path.empty()) cfg = ExperimentConfig::load(flags.config_path);
    // precedence: flag > config > default
    if (flags.seed_set) cfg.seed = flags.seed;
    if (flags.out_set) cfg.out_dir = flags.out_dir;
    if (flags.contexts_set) cfg.contexts = flags.contexts;
    if (flags.threshold_set) cfg.threshold = flags.threshold;
    if (flags.merge_set) cfg.merge = flags.merge;
    if (flags.modes_set) {
        cfg.modes.clear();
        std::string cur;
        for (char c : flags.modes_csv + ",") {
            if (c == ',') {
                if (!cur.empty()) cfg.modes.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
    }
    return cfg;
}

int finish(const ExperimentConfig& cfg, const CommandResult& result) {
    qontexts::exp::write_outputs(cfg, result);
    std::cout << result.summary;
    std::cout << "report: " << cfg.out_dir << "/report.json\n";
    return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Desk-scale multi-programmed quantum machine security toolkit"};
    app.require_subcommand(1);

    CommonFlags flags;
    auto* characterize = app.add_subcommand("characterize", "crosstalk micro-benchmark sweeps");
    auto* attack_demo = app.add_subcommand("attack-demo", "co-run BV victims with attack circuits");
    auto* run = app.add_subcommand("run", "execute a queue under the configured modes");
    auto* analytics = app.add_subcommand("analytics", "closed-form models and queue simulation");
    auto* report = app.add_subcommand("report", "re-render the summary of a report.json");
    for (auto* sub : {characterize, attack_demo, run, analytics}) add_common(sub, flags);

    std::string report_path;
    report->add_option("path", report_path, "path to report.json")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (report->parsed()) {
            std::ifstream in(report_path);
            if (!in) {
                std::cerr << "cannot open " << report_path << "\n";
                return 1;
            }
            nlohmann::json j;
            in >> j;
            std::cout << qontexts::exp::render_report(j);
            return 0;
        }
        ExperimentConfig cfg = resolve(flags);
        if (characterize->parsed()) return finish(cfg, qontexts::exp::cmd_characterize(cfg));
        if (attack_demo->parsed()) return finish(cfg, qontexts::exp::cmd_attack_demo(cfg));
        if (run->parsed()) return finish(cfg, qontexts::exp::cmd_run(cfg));
        if (analytics->parsed()) return finish(cfg, qontexts::exp::cmd_analytics(cfg));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
