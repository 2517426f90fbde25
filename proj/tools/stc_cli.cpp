#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "stc/cli_ops.hpp"
#include "stc/io.hpp"

// Command-line driver: certify | simulate | bench.
// Exit codes: 0 success, 1 usage, 2 infeasible certification,
// 3 bound violation, 4 out-of-region.
int main(int argc, char** argv) {
    CLI::App app{"Dynamic self-triggered control toolbox"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".", bank_path;
    double dt = 1e-3;
    std::uint64_t seed = 0;
    app.add_option("--config", config_path, "experiment config JSON");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--bank", bank_path, "certificate bank JSON path");
    app.add_option("--seed", seed, "seed for Monte-Carlo verification");
    app.add_option("--dt", dt, "maximum integration step");

    auto* certify = app.add_subcommand("certify", "synthesize and persist a certificate bank");
    auto* simulate = app.add_subcommand("simulate", "run one experiment");
    auto* bench = app.add_subcommand("bench", "run the mechanism comparison table");
    // Let the shared flags appear after the subcommand name too.
    for (auto* sub : {certify, simulate, bench}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return stc::kExitUsage;
    }

    try {
        std::string log;
        int rc = stc::kExitOk;
        if (certify->parsed()) {
            if (config_path.empty()) {
                std::fprintf(stderr, "certify requires --config\n");
                return stc::kExitUsage;
            }
            const auto cfg = stc::parse_experiment_config(stc::read_text_file(config_path));
            if (bank_path.empty()) bank_path = out_dir + "/bank.json";
            rc = stc::cmd_certify(cfg, bank_path, log);
        } else if (simulate->parsed()) {
            if (config_path.empty()) {
                std::fprintf(stderr, "simulate requires --config\n");
                return stc::kExitUsage;
            }
            const auto cfg = stc::parse_experiment_config(stc::read_text_file(config_path));
            rc = stc::cmd_simulate(cfg, out_dir, bank_path, dt, log);
        } else if (bench->parsed()) {
            std::vector<stc::ExperimentConfig> cfgs;
            if (!config_path.empty()) {
                const auto j = nlohmann::json::parse(stc::read_text_file(config_path));
                if (j.contains("experiments"))
                    for (const auto& je : j["experiments"])
                        cfgs.push_back(stc::parse_experiment_config(je.dump()));
                else
                    cfgs.push_back(stc::parse_experiment_config(j.dump()));
            }
            rc = stc::cmd_bench(cfgs, out_dir, dt, log);
        }
        std::fputs(log.c_str(), stdout);
        return rc;
    } catch (const stc::OutOfRegionError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return stc::kExitOutOfRegion;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return stc::kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return stc::kExitUsage;
    }
}
