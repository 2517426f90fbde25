#ifndef STC_CLI_OPS_HPP
#define STC_CLI_OPS_HPP

#include <optional>
#include <string>
#include <vector>

#include "stc/certificates.hpp"
#include "stc/hybrid_sim.hpp"

// Shared command implementations for the CLI driver and the acceptance suite.
namespace stc {

// Process exit codes.
enum ExitCode {
    kExitOk = 0,
    kExitUsage = 1,
    kExitInfeasible = 2,
    kExitBoundViolation = 3,
    kExitOutOfRegion = 4,
};

struct ExperimentConfig {
    std::string system;              // "example1" | "example2"
    std::string mechanism = "fir";   // "fir" | "iir" | "ref" | "baseline"
    std::string variant;             // "iss" | "ras" (defaults per system)
    int fir_m = 21;
    double iir_r1 = 0.9, iir_r2 = 0.1;
    std::optional<double> eps_ref, delta, horizon;
    std::optional<std::vector<double>> x0;
    std::string disturbance = "paper";  // "paper" | "none"
};

ExperimentConfig parse_experiment_config(const std::string& json_text);

// Bundle of per-system defaults resolved from an ExperimentConfig.
struct ResolvedExperiment {
    NonlinearSystem system;
    EmbeddingBuilder builder;
    TriggerConfig trigger;
    Eigen::VectorXd x0;
    DisturbanceSignal disturbance;
    double horizon;
    double baseline_period;  // fixed baseline period (Example 1); 0 = level-adaptive
};

CertificateBank build_bank_for(const std::string& system);
ResolvedExperiment resolve_experiment(const ExperimentConfig& cfg);

MechanismState make_mechanism(const ExperimentConfig& cfg, const TriggerConfig& trigger,
                              double v0);

// certify: synthesize the bank for config.system, print the per-level table
// and write the JSON bank.
int cmd_certify(const ExperimentConfig& cfg, const std::string& bank_path, std::string& out_log);

// simulate: run one experiment, write trajectory CSV + JSON summary into
// out_dir, run the bound oracle.
int cmd_simulate(const ExperimentConfig& cfg, const std::string& out_dir,
                 const std::string& bank_path, double dt_max, std::string& out_log);

// bench: all three mechanisms plus the baseline on identical inputs; writes
// bench.csv and bench.txt into out_dir.
int cmd_bench(const std::vector<ExperimentConfig>& cfgs, const std::string& out_dir,
              double dt_max, std::string& out_log);

}  // namespace stc

#endif  // STC_CLI_OPS_HPP
